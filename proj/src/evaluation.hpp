#pragma once

#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"

namespace pup {

// Candidate-pool protocols. `standard` ranks against every item the user has
// not already interacted with; `cir` restricts the pool to items of the
// user's test-positive unexplored categories; `ucir` widens it to items of
// every category absent from the user's training history.
enum class Protocol { standard, cir, ucir };

Protocol parse_protocol(std::string_view name);
std::string_view protocol_name(Protocol protocol);

struct KMetrics {
  int k = 0;
  double recall = 0.0;
  double ndcg = 0.0;
};

struct UserResult {
  int user = 0;
  std::vector<KMetrics> per_k;
};

struct MetricsReport {
  Protocol protocol = Protocol::standard;
  std::vector<int> ks;
  std::vector<double> recall;  // parallel to ks
  std::vector<double> ndcg;    // parallel to ks
  int users_evaluated = 0;
  std::vector<UserResult> per_user;
};

struct EvalOptions {
  std::vector<int> ks = {50, 100};
  int threads = 1;
};

// Scores every candidate for the user and returns the top-k item indices,
// best first, ties broken by ascending item index. Returns the whole pool
// when k exceeds it. The caller is responsible for excluding the user's
// train/validation positives from `candidates`.
std::vector<int> recommend_topk(const RankingModel& model, int user,
                                const std::vector<int>& candidates, int k);

// |ranked ∩ relevant| / |relevant|.
double recall_at_k(const std::vector<int>& ranked,
                   const std::vector<int>& relevant);

// Binary-relevance NDCG: DCG sums 1/log2(r+1) over hit ranks r (1-based,
// r <= k), normalized by the ideal DCG of min(|relevant|, k) leading hits.
double ndcg_at_k(const std::vector<int>& ranked,
                 const std::vector<int>& relevant, int k);

// Items whose category holds a test positive of the user but no train
// interaction. Empty when the user has no such category.
std::vector<int> build_cir_pool(const Dataset& dataset, int user);

// Items of every category absent from the user's training history.
std::vector<int> build_ucir_pool(const Dataset& dataset, int user);

// Ranks candidates per user and averages Recall@K / NDCG@K uniformly over
// the evaluated users. A user is evaluated when the protocol leaves them a
// non-empty candidate pool and at least one reachable test positive;
// otherwise they are skipped. Per-user work runs on `options.threads`
// threads; the reduction order is fixed, so results do not depend on the
// thread count.
MetricsReport evaluate(const RankingModel& model, const EvalOptions& options,
                       Protocol protocol = Protocol::standard);

struct GroupedReports {
  double threshold = 0.0;
  MetricsReport consistent;    // entropy <= threshold
  MetricsReport inconsistent;  // entropy > threshold
  // Per-user CWTP entropy; NaN for users with no training history (they
  // belong to neither group).
  std::vector<double> user_entropy;
};

// Splits users by the entropy of their price-level profile and evaluates
// the standard protocol within each group.
GroupedReports evaluate_by_entropy_group(const RankingModel& model,
                                         const EvalOptions& options,
                                         double threshold);

}  // namespace pup
