#pragma once

#include <span>
#include <vector>

#include "dataset.hpp"
#include "graph.hpp"
#include "matrix.hpp"

namespace pup {

// Sum of all pairwise inner products of the given vectors, computed in linear
// time as 0.5 * ((sum of vectors)^2 - sum of squares) per dimension.
double score_branch(const std::vector<std::span<const double>>& vectors);

// Which node kinds feed a scoring branch. The user is always present; a
// branch with fewer than two features is inactive and scores 0.
struct BranchSpec {
  bool use_item = false;
  bool use_category = false;
  bool use_price = false;

  int feature_count() const {
    return 1 + (use_item ? 1 : 0) + (use_category ? 1 : 0) +
           (use_price ? 1 : 0);
  }
  bool active() const { return feature_count() >= 2; }
};

// Node indices of the branch's features for a (user, item) pair, in a fixed
// order: user, item, category, price.
std::vector<int> branch_nodes(const BranchSpec& spec, const HeteroGraph& graph,
                              const Dataset& dataset, int user, int item);

struct BranchScore {
  double global = 0.0;
  double category = 0.0;
  double combined = 0.0;
};

// Two-branch score: global reads (user, item, price) from its encoder output,
// category reads (user, category, price) from a separately parameterized
// encoder; combined = global + alpha * category. Inactive branches score 0.
// An inactive category branch may pass an empty encoding matrix.
BranchScore score_pup(int user, int item, const Matrix& global_encoding,
                      const Matrix& category_encoding, const HeteroGraph& graph,
                      const Dataset& dataset, const BranchSpec& global_spec,
                      const BranchSpec& category_spec, double alpha);

// Full-model convenience: global = {user, item, price},
// category = {user, category, price}.
BranchScore score_pup(int user, int item, const Matrix& global_encoding,
                      const Matrix& category_encoding, const HeteroGraph& graph,
                      const Dataset& dataset, double alpha);

}  // namespace pup
