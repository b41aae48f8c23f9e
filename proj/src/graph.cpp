#include "graph.hpp"

#include <algorithm>

#include "error.hpp"

namespace pup {

HeteroGraph build_graph(const Dataset& dataset, bool include_category_nodes,
                        bool include_price_nodes) {
  HeteroGraph g;
  g.user_count = dataset.user_count();
  g.item_count = dataset.item_count();
  g.category_count = dataset.category_count();
  g.price_level_count = dataset.price_level_count;
  g.include_category_nodes = include_category_nodes;
  g.include_price_nodes = include_price_nodes;

  for (const auto& [u, i] : dataset.train) {
    if (u < 0 || u >= g.user_count || i < 0 || i >= g.item_count) {
      fail(ErrorCode::invalid_argument, "training pair out of range");
    }
    g.edges.emplace_back(g.user_node(u), g.item_node(i));
  }
  for (int i = 0; i < g.item_count; ++i) {
    if (include_category_nodes) {
      g.edges.emplace_back(g.item_node(i),
                           g.category_node(dataset.item_category[i]));
    }
    if (include_price_nodes) {
      g.edges.emplace_back(g.item_node(i),
                           g.price_node(dataset.item_price_level[i]));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

NormalizedAdjacency build_normalized_adjacency(const HeteroGraph& graph) {
  const int n = graph.node_count();
  std::vector<std::vector<int>> rows(n);
  for (int v = 0; v < n; ++v) rows[v].push_back(v);  // self-loop
  for (const auto& [a, b] : graph.edges) {
    rows[a].push_back(b);
    rows[b].push_back(a);
  }

  NormalizedAdjacency adj;
  adj.offsets.reserve(n + 1);
  adj.offsets.push_back(0);
  adj.weights.reserve(n);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    adj.neighbors.insert(adj.neighbors.end(), row.begin(), row.end());
    adj.offsets.push_back(static_cast<int>(adj.neighbors.size()));
    adj.weights.push_back(1.0 / static_cast<double>(row.size()));
  }
  return adj;
}

std::string dump_edges(const HeteroGraph& graph) {
  std::vector<std::string> lines;
  lines.reserve(graph.edges.size());
  for (const auto& [a, b] : graph.edges) {
    lines.push_back(std::to_string(a) + '\t' + std::to_string(b) + '\n');
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& line : lines) out += line;
  return out;
}

}  // namespace pup
