#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"

namespace pup {

// Unified graph over users, items, categories and price levels, one shared
// index space: users [0, M), items [M, M+N), categories next, prices last.
// Category and price nodes are always allocated, even when their edges are
// disabled for an ablation, so node indices stay stable across variants.
struct HeteroGraph {
  int user_count = 0;
  int item_count = 0;
  int category_count = 0;
  int price_level_count = 0;
  bool include_category_nodes = true;
  bool include_price_nodes = true;
  std::vector<std::pair<int, int>> edges;  // undirected, deduplicated, src < dst

  int node_count() const {
    return user_count + item_count + category_count + price_level_count;
  }
  int user_node(int u) const { return u; }
  int item_node(int i) const { return user_count + i; }
  int category_node(int c) const { return user_count + item_count + c; }
  int price_node(int level) const {
    return user_count + item_count + category_count + level;
  }
};

// Edges come from the training split (deduplicated user-item pairs) plus one
// category and one price edge per item when the respective flag is on.
HeteroGraph build_graph(const Dataset& dataset, bool include_category_nodes,
                        bool include_price_nodes);

// Rectified row-stochastic adjacency in CSR form. Every row holds the node
// itself plus its neighbors, each weighted 1/|N_v|.
struct NormalizedAdjacency {
  std::vector<int> offsets;     // size node_count + 1
  std::vector<int> neighbors;   // sorted within each row, includes v
  std::vector<double> weights;  // one uniform weight per row

  int node_count() const { return static_cast<int>(offsets.size()) - 1; }
  std::span<const int> row(int v) const {
    return {neighbors.data() + offsets[v],
            static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
  }
  double weight(int v) const { return weights[v]; }
};

NormalizedAdjacency build_normalized_adjacency(const HeteroGraph& graph);

// Edge list as "src\tdst\n" lines sorted lexicographically, for golden-file
// comparisons.
std::string dump_edges(const HeteroGraph& graph);

}  // namespace pup
