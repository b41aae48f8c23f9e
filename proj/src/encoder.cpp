#include "encoder.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace pup {

Matrix init_embeddings(int node_count, int dim, std::uint64_t seed) {
  if (node_count < 1 || dim < 1) {
    fail(ErrorCode::invalid_argument, "embedding shape must be positive");
  }
  const double scale = 0.1 / std::sqrt(static_cast<double>(dim));
  Rng rng(seed);
  Matrix w(node_count, dim);
  for (double& v : w.flat()) v = rng.next_uniform(-scale, scale);
  return w;
}

Matrix encode(const NormalizedAdjacency& adjacency, const Matrix& W) {
  if (W.rows() != adjacency.node_count()) {
    fail(ErrorCode::mismatch, "embedding rows (" + std::to_string(W.rows()) +
                                  ") do not match graph nodes (" +
                                  std::to_string(adjacency.node_count()) + ")");
  }
  const int d = W.cols();
  Matrix out(W.rows(), d);
  std::vector<double> acc(d);
  for (int v = 0; v < W.rows(); ++v) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int j : adjacency.row(v)) {
      const auto wj = W.row(j);
      for (int k = 0; k < d; ++k) acc[k] += wj[k];
    }
    const double scale = adjacency.weight(v);
    auto dest = out.row(v);
    for (int k = 0; k < d; ++k) dest[k] = std::tanh(acc[k] * scale);
  }
  return out;
}

std::vector<double> propagate_message(std::span<const double> ej,
                                      int neighbor_count) {
  if (neighbor_count < 1) {
    fail(ErrorCode::invalid_argument, "neighbor count must be >= 1");
  }
  std::vector<double> out(ej.begin(), ej.end());
  for (double& v : out) v /= neighbor_count;
  return out;
}

std::vector<std::uint8_t> feature_dropout_mask(int rows, double p,
                                               std::uint64_t seed) {
  if (p < 0.0 || p >= 1.0) {
    fail(ErrorCode::invalid_argument, "dropout probability must be in [0, 1)");
  }
  Rng rng(seed);
  std::vector<std::uint8_t> mask(rows);
  for (auto& keep : mask) keep = rng.next_bernoulli(p) ? 0 : 1;
  return mask;
}

Matrix apply_dropout_mask(const Matrix& F, const std::vector<std::uint8_t>& mask,
                          double p) {
  if (static_cast<int>(mask.size()) != F.rows()) {
    fail(ErrorCode::mismatch, "dropout mask size does not match rows");
  }
  const double scale = 1.0 / (1.0 - p);
  Matrix out(F.rows(), F.cols());
  for (int r = 0; r < F.rows(); ++r) {
    if (!mask[r]) continue;
    const auto src = F.row(r);
    auto dst = out.row(r);
    for (int k = 0; k < F.cols(); ++k) dst[k] = src[k] * scale;
  }
  return out;
}

Matrix apply_feature_dropout(const Matrix& F, double p, std::uint64_t seed,
                             bool training) {
  if (p < 0.0 || p >= 1.0) {
    fail(ErrorCode::invalid_argument, "dropout probability must be in [0, 1)");
  }
  if (!training || p == 0.0) return F;
  return apply_dropout_mask(F, feature_dropout_mask(F.rows(), p, seed), p);
}

}  // namespace pup
