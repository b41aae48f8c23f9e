#include "decoder.hpp"

#include "error.hpp"

namespace pup {

double score_branch(const std::vector<std::span<const double>>& vectors) {
  if (vectors.size() < 2) {
    fail(ErrorCode::invalid_argument,
         "pairwise score needs at least two vectors");
  }
  const std::size_t d = vectors[0].size();
  for (const auto& v : vectors) {
    if (v.size() != d) {
      fail(ErrorCode::mismatch, "pairwise score dimensions differ");
    }
  }
  double score = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& v : vectors) {
      sum += v[k];
      sum_sq += v[k] * v[k];
    }
    score += 0.5 * (sum * sum - sum_sq);
  }
  return score;
}

std::vector<int> branch_nodes(const BranchSpec& spec, const HeteroGraph& graph,
                              const Dataset& dataset, int user, int item) {
  if (user < 0 || user >= graph.user_count) {
    fail(ErrorCode::invalid_argument,
         "user index " + std::to_string(user) + " out of range");
  }
  if (item < 0 || item >= graph.item_count) {
    fail(ErrorCode::invalid_argument,
         "item index " + std::to_string(item) + " out of range");
  }
  std::vector<int> nodes;
  nodes.push_back(graph.user_node(user));
  if (spec.use_item) nodes.push_back(graph.item_node(item));
  if (spec.use_category) {
    nodes.push_back(graph.category_node(dataset.item_category[item]));
  }
  if (spec.use_price) {
    nodes.push_back(graph.price_node(dataset.item_price_level[item]));
  }
  return nodes;
}

namespace {

double branch_score_at(const BranchSpec& spec, const Matrix& encoding,
                       const HeteroGraph& graph, const Dataset& dataset,
                       int user, int item) {
  if (!spec.active()) return 0.0;
  auto nodes = branch_nodes(spec, graph, dataset, user, item);
  std::vector<std::span<const double>> rows;
  rows.reserve(nodes.size());
  for (int v : nodes) rows.push_back(encoding.row(v));
  return score_branch(rows);
}

}  // namespace

BranchScore score_pup(int user, int item, const Matrix& global_encoding,
                      const Matrix& category_encoding, const HeteroGraph& graph,
                      const Dataset& dataset, const BranchSpec& global_spec,
                      const BranchSpec& category_spec, double alpha) {
  BranchScore s;
  s.global =
      branch_score_at(global_spec, global_encoding, graph, dataset, user, item);
  s.category = branch_score_at(category_spec, category_encoding, graph, dataset,
                               user, item);
  s.combined = s.global + alpha * s.category;
  return s;
}

BranchScore score_pup(int user, int item, const Matrix& global_encoding,
                      const Matrix& category_encoding, const HeteroGraph& graph,
                      const Dataset& dataset, double alpha) {
  BranchSpec global_spec{.use_item = true, .use_category = false,
                         .use_price = true};
  BranchSpec category_spec{.use_item = false, .use_category = true,
                           .use_price = true};
  return score_pup(user, item, global_encoding, category_encoding, graph,
                   dataset, global_spec, category_spec, alpha);
}

}  // namespace pup
