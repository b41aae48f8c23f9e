#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graph.hpp"
#include "matrix.hpp"

namespace pup {

// Free embeddings, one row per graph node, uniform in +-0.1/sqrt(dim) so the
// first propagation stays in the near-linear region of tanh.
Matrix init_embeddings(int node_count, int dim, std::uint64_t seed);

// One propagation round: out[v] = tanh(sum_{j in N_v} W[j] / |N_v|), with N_v
// including v itself.
Matrix encode(const NormalizedAdjacency& adjacency, const Matrix& W);

// Message from a single neighbor: ej / neighbor_count.
std::vector<double> propagate_message(std::span<const double> ej,
                                      int neighbor_count);

// Per-row keep/drop decisions for feature-level dropout; mask[v] == 1 keeps
// row v. Deterministic given the seed so forward and backward passes agree.
std::vector<std::uint8_t> feature_dropout_mask(int rows, double p,
                                               std::uint64_t seed);

// Zeroes dropped rows and scales survivors by 1/(1-p).
Matrix apply_dropout_mask(const Matrix& F, const std::vector<std::uint8_t>& mask,
                          double p);

// Training mode: rows dropped independently with probability p, survivors
// rescaled. Inference mode returns F unchanged.
Matrix apply_feature_dropout(const Matrix& F, double p, std::uint64_t seed,
                             bool training);

}  // namespace pup
