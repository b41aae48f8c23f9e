#include "training.hpp"

#include <algorithm>
#include <cmath>

#include "encoder.hpp"
#include "error.hpp"

namespace pup {

void TrainConfig::validate() const {
  if (total_dim < 1) fail(ErrorCode::invalid_argument, "total_dim must be >= 1");
  if (dim_global < 1) fail(ErrorCode::invalid_argument, "dim_global must be >= 1");
  if (dim_category < 0) {
    fail(ErrorCode::invalid_argument, "dim_category must be >= 0");
  }
  if (dim_global + dim_category != total_dim) {
    fail(ErrorCode::invalid_argument,
         "dimension split " + std::to_string(dim_global) + "+" +
             std::to_string(dim_category) + " does not sum to " +
             std::to_string(total_dim));
  }
  if (learning_rate < 0.0) {
    fail(ErrorCode::invalid_argument, "learning_rate must be >= 0");
  }
  if (batch_size < 1) fail(ErrorCode::invalid_argument, "batch_size must be >= 1");
  if (epochs < 0) fail(ErrorCode::invalid_argument, "epochs must be >= 0");
  if (neg_rate < 1) fail(ErrorCode::invalid_argument, "neg_rate must be >= 1");
  if (lambda_reg < 0.0) {
    fail(ErrorCode::invalid_argument, "lambda_reg must be >= 0");
  }
  if (dropout_p < 0.0 || dropout_p >= 1.0) {
    fail(ErrorCode::invalid_argument, "dropout_p must be in [0, 1)");
  }
}

std::vector<std::unordered_set<int>> train_positive_sets(const Dataset& dataset) {
  std::vector<std::unordered_set<int>> sets(dataset.user_count());
  for (const auto& [u, i] : dataset.train) sets[u].insert(i);
  return sets;
}

int sample_negative(int user,
                    const std::vector<std::unordered_set<int>>& positives,
                    int item_count, Rng& rng) {
  const auto& owned = positives[user];
  if (static_cast<int>(owned.size()) >= item_count) {
    fail(ErrorCode::invalid_argument,
         "user " + std::to_string(user) +
             " interacted with every item; no negative exists");
  }
  for (;;) {
    const int j = static_cast<int>(rng.next_below(item_count));
    if (!owned.count(j)) return j;
  }
}

double bpr_loss(double s_ui, double s_uj) {
  const double margin = s_ui - s_uj;
  if (margin >= 0.0) return std::log1p(std::exp(-margin));
  return -margin + std::log1p(std::exp(margin));
}

double bpr_loss_margin_grad(double margin) {
  if (margin >= 0.0) {
    const double e = std::exp(-margin);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(margin));
}

void adam_step(Matrix& params, const Matrix& grads, AdamState& state,
               double lr) {
  if (params.rows() != grads.rows() || params.cols() != grads.cols() ||
      params.rows() != state.m.rows() || params.cols() != state.m.cols()) {
    fail(ErrorCode::mismatch, "optimizer shapes disagree");
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  state.t += 1;
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.t));
  auto p = params.flat();
  auto g = grads.flat();
  auto m = state.m.flat();
  auto v = state.v.flat();
  for (std::size_t k = 0; k < p.size(); ++k) {
    m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
    v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
    const double m_hat = m[k] / bias1;
    const double v_hat = v[k] / bias2;
    p[k] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
  }
}

PupObjective::PupObjective(const Dataset& dataset, const HeteroGraph& graph,
                           const NormalizedAdjacency& adjacency,
                           const TrainConfig& config, BranchSpec global_spec,
                           BranchSpec category_spec)
    : dataset_(dataset),
      graph_(graph),
      adjacency_(adjacency),
      global_spec_(global_spec),
      category_spec_(category_spec),
      lambda_(config.lambda_reg),
      alpha_(config.alpha),
      dropout_p_(config.dropout_p) {
  if (!global_spec_.active()) {
    fail(ErrorCode::invalid_argument, "the global branch cannot be inactive");
  }
  category_dim_ = category_spec_.active() ? config.dim_category : 0;
  global_weights_ = init_embeddings(graph.node_count(), config.dim_global,
                                    derive_seed(config.seed, "init-global"));
  if (category_dim_ > 0) {
    category_weights_ = init_embeddings(graph.node_count(), category_dim_,
                                        derive_seed(config.seed, "init-category"));
  }
}

std::vector<Matrix*> PupObjective::parameters() {
  std::vector<Matrix*> params = {&global_weights_};
  if (category_dim_ > 0) params.push_back(&category_weights_);
  return params;
}

Matrix PupObjective::encode_global() const {
  return encode(adjacency_, global_weights_);
}

Matrix PupObjective::encode_category() const {
  if (category_dim_ == 0) return Matrix();
  return encode(adjacency_, category_weights_);
}

namespace {

// Branch score at (user, item) from decoder-visible encodings, returning the
// feature-sum vector for reuse in the backward pass.
double branch_forward(const BranchSpec& spec, const Matrix& D,
                      const HeteroGraph& graph, const Dataset& dataset,
                      int user, int item, std::vector<int>& nodes,
                      std::vector<double>& total) {
  nodes = branch_nodes(spec, graph, dataset, user, item);
  const int d = D.cols();
  total.assign(d, 0.0);
  double sum_sq = 0.0;
  for (int r : nodes) {
    const auto row = D.row(r);
    for (int k = 0; k < d; ++k) {
      total[k] += row[k];
      sum_sq += row[k] * row[k];
    }
  }
  double norm_sq = 0.0;
  for (int k = 0; k < d; ++k) norm_sq += total[k] * total[k];
  return 0.5 * (norm_sq - sum_sq);
}

// dL/dD[r] += coeff * (total - D[r]) for each branch feature row.
void branch_backward(const Matrix& D, const std::vector<int>& nodes,
                     const std::vector<double>& total, double coeff,
                     Matrix& G) {
  const int d = D.cols();
  for (int r : nodes) {
    const auto row = D.row(r);
    auto grad = G.row(r);
    for (int k = 0; k < d; ++k) grad[k] += coeff * (total[k] - row[k]);
  }
}

void check_finite(const Matrix& g, const char* what) {
  for (double v : g.flat()) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::diverged, std::string(what) + " gradient is not finite");
    }
  }
}

}  // namespace

double PupObjective::batch_loss_and_gradients(std::span<const Triplet> batch,
                                              std::uint64_t dropout_seed,
                                              bool use_dropout,
                                              std::vector<Matrix>& grads) {
  if (batch.empty()) fail(ErrorCode::invalid_argument, "empty batch");
  const bool cat = category_dim_ > 0;
  if (grads.size() != (cat ? 2u : 1u)) {
    fail(ErrorCode::mismatch, "gradient buffer count mismatch");
  }
  const int node_count = adjacency_.node_count();
  const double inv_b = 1.0 / static_cast<double>(batch.size());

  Matrix f_global = encode(adjacency_, global_weights_);
  Matrix f_category = cat ? encode(adjacency_, category_weights_) : Matrix();

  const bool drop = use_dropout && dropout_p_ > 0.0;
  std::vector<std::uint8_t> mask_global, mask_category;
  if (drop) {
    mask_global = feature_dropout_mask(node_count, dropout_p_,
                                       splitmix64(dropout_seed ^ 0x9E37ULL));
    if (cat) {
      mask_category = feature_dropout_mask(node_count, dropout_p_,
                                           splitmix64(dropout_seed ^ 0x79B9ULL));
    }
  }
  const Matrix d_global =
      drop ? apply_dropout_mask(f_global, mask_global, dropout_p_) : f_global;
  const Matrix d_category =
      (drop && cat) ? apply_dropout_mask(f_category, mask_category, dropout_p_)
                    : f_category;

  // dL/d(decoder-visible encodings), accumulated over the batch.
  Matrix enc_grad_global(node_count, global_weights_.cols());
  Matrix enc_grad_category(cat ? node_count : 0, category_dim_);

  double loss = 0.0;
  std::vector<int> nodes_pos, nodes_neg;
  std::vector<double> total_pos, total_neg;
  std::vector<int> touched;
  for (const Triplet& t : batch) {
    double s_pos = 0.0, s_neg = 0.0;

    // Global branch forward for both items.
    std::vector<int> g_nodes_pos, g_nodes_neg;
    std::vector<double> g_total_pos, g_total_neg;
    s_pos += branch_forward(global_spec_, d_global, graph_, dataset_, t.user,
                            t.pos, g_nodes_pos, g_total_pos);
    s_neg += branch_forward(global_spec_, d_global, graph_, dataset_, t.user,
                            t.neg, g_nodes_neg, g_total_neg);

    std::vector<int> c_nodes_pos, c_nodes_neg;
    std::vector<double> c_total_pos, c_total_neg;
    if (cat) {
      s_pos += alpha_ * branch_forward(category_spec_, d_category, graph_,
                                       dataset_, t.user, t.pos, c_nodes_pos,
                                       c_total_pos);
      s_neg += alpha_ * branch_forward(category_spec_, d_category, graph_,
                                       dataset_, t.user, t.neg, c_nodes_neg,
                                       c_total_neg);
    }

    const double margin = s_pos - s_neg;
    loss += bpr_loss(s_pos, s_neg) * inv_b;
    const double gm = bpr_loss_margin_grad(margin) * inv_b;

    branch_backward(d_global, g_nodes_pos, g_total_pos, gm, enc_grad_global);
    branch_backward(d_global, g_nodes_neg, g_total_neg, -gm, enc_grad_global);
    if (cat) {
      branch_backward(d_category, c_nodes_pos, c_total_pos, gm * alpha_,
                      enc_grad_category);
      branch_backward(d_category, c_nodes_neg, c_total_neg, -gm * alpha_,
                      enc_grad_category);
    }

    // L2 on the free embedding rows this triplet reads, per branch.
    if (lambda_ > 0.0) {
      auto regularize = [&](const std::vector<int>& pos_nodes,
                            const std::vector<int>& neg_nodes, Matrix& weights,
                            Matrix& grad) {
        touched = pos_nodes;
        touched.insert(touched.end(), neg_nodes.begin(), neg_nodes.end());
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()),
                      touched.end());
        for (int r : touched) {
          const auto row = weights.row(r);
          auto g = grad.row(r);
          for (int k = 0; k < weights.cols(); ++k) {
            loss += lambda_ * inv_b * row[k] * row[k];
            g[k] += 2.0 * lambda_ * inv_b * row[k];
          }
        }
      };
      regularize(g_nodes_pos, g_nodes_neg, global_weights_, grads[0]);
      if (cat) {
        regularize(c_nodes_pos, c_nodes_neg, category_weights_, grads[1]);
      }
    }
  }

  // Backward through dropout, tanh, and the neighbor averaging.
  auto encoder_backward = [&](const Matrix& f, const Matrix& enc_grad,
                              const std::vector<std::uint8_t>& mask,
                              Matrix& grad) {
    const int d = f.cols();
    Matrix pre(node_count, d);
    const double keep_scale = drop ? 1.0 / (1.0 - dropout_p_) : 1.0;
    for (int v = 0; v < node_count; ++v) {
      if (drop && !mask[v]) continue;  // dropped rows pass no gradient
      const auto fv = f.row(v);
      const auto gv = enc_grad.row(v);
      auto pv = pre.row(v);
      for (int k = 0; k < d; ++k) {
        pv[k] = gv[k] * keep_scale * (1.0 - fv[k] * fv[k]);
      }
    }
    for (int v = 0; v < node_count; ++v) {
      const double w = adjacency_.weight(v);
      const auto pv = pre.row(v);
      for (int r : adjacency_.row(v)) {
        auto gr = grad.row(r);
        for (int k = 0; k < d; ++k) gr[k] += w * pv[k];
      }
    }
  };
  encoder_backward(f_global, enc_grad_global, mask_global, grads[0]);
  if (cat) {
    encoder_backward(f_category, enc_grad_category, mask_category, grads[1]);
  }

  if (!std::isfinite(loss)) fail(ErrorCode::diverged, "loss is not finite");
  check_finite(grads[0], "global branch");
  if (cat) check_finite(grads[1], "category branch");
  return loss;
}

std::vector<EpochRecord> train_bpr(BprObjective& objective,
                                   const Dataset& dataset,
                                   const TrainConfig& config) {
  config.validate();
  if (dataset.train.empty()) {
    fail(ErrorCode::invalid_argument, "training split is empty");
  }
  const auto positives = train_positive_sets(dataset);
  auto params = objective.parameters();
  std::vector<AdamState> states;
  std::vector<Matrix> grads;
  for (Matrix* p : params) {
    states.emplace_back(p->rows(), p->cols());
    grads.emplace_back(p->rows(), p->cols());
  }

  Rng sample_rng(derive_seed(config.seed, "negative-sampling"));
  Rng shuffle_rng(derive_seed(config.seed, "batch-shuffle"));
  Rng dropout_rng(derive_seed(config.seed, "dropout-stream"));

  double lr = config.learning_rate;
  std::vector<EpochRecord> history;
  history.reserve(config.epochs);
  std::vector<Triplet> triplets;
  triplets.reserve(dataset.train.size() * config.neg_rate);

  for (int e = 0; e < config.epochs; ++e) {
    const int epoch_number = e + 1;
    if (epoch_number == config.decay1() || epoch_number == config.decay2()) {
      lr *= 0.1;
    }

    triplets.clear();
    for (const auto& [u, i] : dataset.train) {
      for (int r = 0; r < config.neg_rate; ++r) {
        triplets.push_back(
            {u, i, sample_negative(u, positives, dataset.item_count(),
                                   sample_rng)});
      }
    }
    for (std::size_t k = triplets.size() - 1; k > 0; --k) {
      std::swap(triplets[k], triplets[shuffle_rng.next_below(k + 1)]);
    }

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < triplets.size();
         start += config.batch_size) {
      const std::size_t len =
          std::min<std::size_t>(config.batch_size, triplets.size() - start);
      auto batch = std::span<const Triplet>(triplets).subspan(start, len);
      for (auto& g : grads) g.fill(0.0);
      double mean;
      try {
        mean = objective.batch_loss_and_gradients(
            batch, dropout_rng.next_u64(), /*use_dropout=*/true, grads);
      } catch (const PupError& error) {
        if (error.code() == ErrorCode::diverged) {
          fail(ErrorCode::diverged, "epoch " + std::to_string(epoch_number) +
                                        ": " + error.what());
        }
        throw;
      }
      if (!std::isfinite(mean)) {
        fail(ErrorCode::diverged,
             "training diverged at epoch " + std::to_string(epoch_number));
      }
      loss_sum += mean * static_cast<double>(len);
      for (std::size_t idx = 0; idx < params.size(); ++idx) {
        adam_step(*params[idx], grads[idx], states[idx], lr);
      }
    }
    history.push_back(
        {epoch_number, loss_sum / static_cast<double>(triplets.size()), lr});
  }
  return history;
}

}  // namespace pup
