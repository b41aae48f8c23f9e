#include "evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <unordered_set>

#include "error.hpp"
#include "log.hpp"

namespace pup {

Protocol parse_protocol(std::string_view name) {
  if (name == "standard") return Protocol::standard;
  if (name == "cir") return Protocol::cir;
  if (name == "ucir") return Protocol::ucir;
  fail(ErrorCode::invalid_argument,
       "unknown protocol '" + std::string(name) +
           "' (expected standard, cir, or ucir)");
}

std::string_view protocol_name(Protocol protocol) {
  switch (protocol) {
    case Protocol::standard: return "standard";
    case Protocol::cir: return "cir";
    case Protocol::ucir: return "ucir";
  }
  fail(ErrorCode::internal, "unhandled protocol");
}

namespace {

// Full ranking of the candidate pool: score descending, index ascending on
// ties. Deterministic for any scorer.
std::vector<int> rank_candidates(const RankingModel& model, int user,
                                 const std::vector<int>& candidates) {
  std::vector<std::pair<double, int>> scored;
  scored.reserve(candidates.size());
  for (int item : candidates) {
    scored.emplace_back(model.score(user, item), item);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> ranked;
  ranked.reserve(scored.size());
  for (const auto& [score, item] : scored) ranked.push_back(item);
  return ranked;
}

}  // namespace

std::vector<int> recommend_topk(const RankingModel& model, int user,
                                const std::vector<int>& candidates, int k) {
  if (k < 1) {
    fail(ErrorCode::invalid_argument, "k must be at least 1");
  }
  if (candidates.empty()) {
    fail(ErrorCode::invalid_argument,
         "empty candidate pool for user " + std::to_string(user));
  }
  auto ranked = rank_candidates(model, user, candidates);
  if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
  return ranked;
}

double recall_at_k(const std::vector<int>& ranked,
                   const std::vector<int>& relevant) {
  if (relevant.empty()) {
    fail(ErrorCode::invalid_argument, "relevant set is empty");
  }
  const std::unordered_set<int> rel(relevant.begin(), relevant.end());
  int hits = 0;
  for (int item : ranked) hits += rel.count(item) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rel.size());
}

double ndcg_at_k(const std::vector<int>& ranked,
                 const std::vector<int>& relevant, int k) {
  if (relevant.empty()) {
    fail(ErrorCode::invalid_argument, "relevant set is empty");
  }
  if (k < 1) {
    fail(ErrorCode::invalid_argument, "k must be at least 1");
  }
  const std::unordered_set<int> rel(relevant.begin(), relevant.end());
  const int depth = std::min<int>(k, static_cast<int>(ranked.size()));
  double dcg = 0.0;
  for (int r = 1; r <= depth; ++r) {
    if (rel.count(ranked[r - 1])) dcg += 1.0 / std::log2(r + 1.0);
  }
  double idcg = 0.0;
  const int ideal = std::min<int>(static_cast<int>(rel.size()), k);
  for (int r = 1; r <= ideal; ++r) idcg += 1.0 / std::log2(r + 1.0);
  return dcg / idcg;
}

namespace {

struct UserHistory {
  std::vector<std::unordered_set<int>> excluded;  // train ∪ validation items
  std::vector<std::unordered_set<int>> train_categories;
  std::vector<std::set<int>> test_items;  // sorted, deduplicated
};

UserHistory collect_history(const Dataset& dataset) {
  UserHistory h;
  const int m = dataset.user_count();
  h.excluded.resize(m);
  h.train_categories.resize(m);
  h.test_items.resize(m);
  for (const auto& [u, i] : dataset.train) {
    h.excluded[u].insert(i);
    h.train_categories[u].insert(dataset.item_category[i]);
  }
  for (const auto& [u, i] : dataset.validation) h.excluded[u].insert(i);
  for (const auto& [u, i] : dataset.test) h.test_items[u].insert(i);
  return h;
}

// Categories holding a test positive of the user but no train interaction.
std::set<int> unexplored_test_categories(const Dataset& dataset,
                                         const UserHistory& history,
                                         int user) {
  std::set<int> cats;
  for (int item : history.test_items[user]) {
    const int cat = dataset.item_category[item];
    if (!history.train_categories[user].count(cat)) cats.insert(cat);
  }
  return cats;
}

struct EvalContext {
  int user = 0;
  std::vector<int> candidates;
  std::vector<int> relevant;
};

// Builds the candidate pool and reachable test positives for one user, or
// returns false when the protocol skips them.
bool build_context(const Dataset& dataset, const UserHistory& history,
                   int user, Protocol protocol, EvalContext& out) {
  if (history.test_items[user].empty()) return false;
  const auto& excluded = history.excluded[user];

  std::vector<int> candidates;
  std::vector<int> relevant;
  if (protocol == Protocol::standard) {
    for (int i = 0; i < dataset.item_count(); ++i) {
      if (!excluded.count(i)) candidates.push_back(i);
    }
    for (int i : history.test_items[user]) {
      if (!excluded.count(i)) relevant.push_back(i);
    }
  } else {
    const auto unexplored = unexplored_test_categories(dataset, history, user);
    if (unexplored.empty()) return false;
    for (int i = 0; i < dataset.item_count(); ++i) {
      const int cat = dataset.item_category[i];
      const bool in_pool =
          protocol == Protocol::cir
              ? unexplored.count(cat) > 0
              : history.train_categories[user].count(cat) == 0;
      if (in_pool && !excluded.count(i)) candidates.push_back(i);
    }
    for (int i : history.test_items[user]) {
      if (unexplored.count(dataset.item_category[i]) && !excluded.count(i)) {
        relevant.push_back(i);
      }
    }
  }

  if (candidates.empty() || relevant.empty()) {
    log_warning("user " + dataset.user_ids[user] + " skipped: no " +
                (candidates.empty() ? "eligible candidates"
                                    : "reachable test positives") +
                " under the " + std::string(protocol_name(protocol)) +
                " protocol");
    return false;
  }
  out.user = user;
  out.candidates = std::move(candidates);
  out.relevant = std::move(relevant);
  return true;
}

UserResult evaluate_user(const RankingModel& model, const EvalContext& ctx,
                         const std::vector<int>& ks) {
  UserResult result;
  result.user = ctx.user;
  const auto ranked = rank_candidates(model, ctx.user, ctx.candidates);
  for (int k : ks) {
    std::vector<int> prefix(
        ranked.begin(),
        ranked.begin() + std::min<std::size_t>(k, ranked.size()));
    KMetrics km;
    km.k = k;
    km.recall = recall_at_k(prefix, ctx.relevant);
    km.ndcg = ndcg_at_k(prefix, ctx.relevant, k);
    result.per_k.push_back(km);
  }
  return result;
}

MetricsReport evaluate_users(const RankingModel& model,
                             const EvalOptions& options, Protocol protocol,
                             const std::vector<int>& users) {
  if (options.ks.empty()) {
    fail(ErrorCode::invalid_argument, "no K values given");
  }
  for (int k : options.ks) {
    if (k < 1) fail(ErrorCode::invalid_argument, "k must be at least 1");
  }
  const Dataset& dataset = model.dataset();
  const auto history = collect_history(dataset);

  std::vector<EvalContext> contexts;
  for (int user : users) {
    EvalContext ctx;
    if (build_context(dataset, history, user, protocol, ctx)) {
      contexts.push_back(std::move(ctx));
    }
  }

  std::vector<UserResult> results(contexts.size());
  const int threads =
      std::min<int>(std::max(1, options.threads), contexts.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < contexts.size(); ++i) {
      results[i] = evaluate_user(model, contexts[i], options.ks);
    }
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (contexts.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(begin + chunk, contexts.size());
      if (begin >= end) break;
      pool.emplace_back([&, begin, end]() {
        for (std::size_t i = begin; i < end; ++i) {
          results[i] = evaluate_user(model, contexts[i], options.ks);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  MetricsReport report;
  report.protocol = protocol;
  report.ks = options.ks;
  report.recall.assign(options.ks.size(), 0.0);
  report.ndcg.assign(options.ks.size(), 0.0);
  report.users_evaluated = static_cast<int>(results.size());
  for (const auto& r : results) {
    for (std::size_t ki = 0; ki < options.ks.size(); ++ki) {
      report.recall[ki] += r.per_k[ki].recall;
      report.ndcg[ki] += r.per_k[ki].ndcg;
    }
  }
  if (!results.empty()) {
    for (std::size_t ki = 0; ki < options.ks.size(); ++ki) {
      report.recall[ki] /= report.users_evaluated;
      report.ndcg[ki] /= report.users_evaluated;
    }
  }
  report.per_user = std::move(results);
  return report;
}

}  // namespace

std::vector<int> build_cir_pool(const Dataset& dataset, int user) {
  const auto history = collect_history(dataset);
  const auto unexplored = unexplored_test_categories(dataset, history, user);
  std::vector<int> pool;
  for (int i = 0; i < dataset.item_count(); ++i) {
    if (unexplored.count(dataset.item_category[i])) pool.push_back(i);
  }
  return pool;
}

std::vector<int> build_ucir_pool(const Dataset& dataset, int user) {
  const auto history = collect_history(dataset);
  std::vector<int> pool;
  for (int i = 0; i < dataset.item_count(); ++i) {
    if (!history.train_categories[user].count(dataset.item_category[i])) {
      pool.push_back(i);
    }
  }
  return pool;
}

MetricsReport evaluate(const RankingModel& model, const EvalOptions& options,
                       Protocol protocol) {
  const Dataset& dataset = model.dataset();
  if (dataset.test.empty()) {
    fail(ErrorCode::invalid_argument, "test split is empty");
  }
  std::vector<int> users(dataset.user_count());
  for (int u = 0; u < dataset.user_count(); ++u) users[u] = u;
  return evaluate_users(model, options, protocol, users);
}

GroupedReports evaluate_by_entropy_group(const RankingModel& model,
                                         const EvalOptions& options,
                                         double threshold) {
  const Dataset& dataset = model.dataset();
  if (dataset.test.empty()) {
    fail(ErrorCode::invalid_argument, "test split is empty");
  }
  const int m = dataset.user_count();

  const auto profiles = compute_all_cwtp(dataset);
  GroupedReports grouped;
  grouped.threshold = threshold;
  grouped.user_entropy.assign(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> consistent_users;
  std::vector<int> inconsistent_users;
  for (int u = 0; u < m; ++u) {
    if (profiles[u].empty()) continue;
    const double h = cwtp_entropy(profiles[u]);
    grouped.user_entropy[u] = h;
    (h <= threshold ? consistent_users : inconsistent_users).push_back(u);
  }
  grouped.consistent =
      evaluate_users(model, options, Protocol::standard, consistent_users);
  grouped.inconsistent =
      evaluate_users(model, options, Protocol::standard, inconsistent_users);
  return grouped;
}

}  // namespace pup
