#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "dataset.hpp"
#include "decoder.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "rng.hpp"

namespace pup {

struct TrainConfig {
  int total_dim = 64;
  int dim_global = 48;
  int dim_category = 16;
  double learning_rate = 1e-2;
  int batch_size = 1024;
  int epochs = 200;
  int neg_rate = 1;
  double lambda_reg = 1e-4;
  double alpha = 1.0;
  double dropout_p = 0.1;
  std::uint64_t seed = 42;
  // -1 selects the default schedule: learning rate times 0.1 at the start of
  // epochs floor(epochs/2) and floor(3*epochs/4), numbered from 1.
  int lr_decay_epoch1 = -1;
  int lr_decay_epoch2 = -1;

  int decay1() const { return lr_decay_epoch1 >= 0 ? lr_decay_epoch1 : epochs / 2; }
  int decay2() const {
    return lr_decay_epoch2 >= 0 ? lr_decay_epoch2 : 3 * epochs / 4;
  }
  void validate() const;
};

struct Triplet {
  int user = 0;
  int pos = 0;
  int neg = 0;
};

// Per-user training positives, the negative sampler's ground truth.
std::vector<std::unordered_set<int>> train_positive_sets(const Dataset& dataset);

// Uniform item not interacted by the user, by rejection. Errors when the user
// has interacted with every item.
int sample_negative(int user,
                    const std::vector<std::unordered_set<int>>& positives,
                    int item_count, Rng& rng);

// -ln sigmoid(s_ui - s_uj), evaluated as softplus(-(s_ui - s_uj)) so large
// negative margins stay finite.
double bpr_loss(double s_ui, double s_uj);

// d bpr_loss / d margin = -sigmoid(-margin).
double bpr_loss_margin_grad(double margin);

struct AdamState {
  Matrix m;
  Matrix v;
  std::int64_t t = 0;

  AdamState(int rows, int cols) : m(rows, cols), v(rows, cols) {}
};

// Standard Adam update (beta1 0.9, beta2 0.999, eps 1e-8, bias correction).
void adam_step(Matrix& params, const Matrix& grads, AdamState& state, double lr);

// A differentiable BPR scorer: exposes its parameter matrices and computes
// mean batch loss (pairwise loss plus L2 on touched rows) with exact analytic
// gradients accumulated into pre-zeroed matrices of matching shapes.
class BprObjective {
 public:
  virtual ~BprObjective() = default;
  virtual std::vector<Matrix*> parameters() = 0;
  virtual double batch_loss_and_gradients(std::span<const Triplet> batch,
                                          std::uint64_t dropout_seed,
                                          bool use_dropout,
                                          std::vector<Matrix>& grads) = 0;
};

// Two-branch graph-convolutional objective. Branch dimensions of 0 (or an
// inactive feature spec) disable the category branch entirely; its matrix is
// then absent from parameters().
class PupObjective : public BprObjective {
 public:
  PupObjective(const Dataset& dataset, const HeteroGraph& graph,
               const NormalizedAdjacency& adjacency, const TrainConfig& config,
               BranchSpec global_spec, BranchSpec category_spec);

  std::vector<Matrix*> parameters() override;
  double batch_loss_and_gradients(std::span<const Triplet> batch,
                                  std::uint64_t dropout_seed, bool use_dropout,
                                  std::vector<Matrix>& grads) override;

  bool has_category_branch() const { return category_dim_ > 0; }
  Matrix& global_weights() { return global_weights_; }
  Matrix& category_weights() { return category_weights_; }
  const BranchSpec& global_spec() const { return global_spec_; }
  const BranchSpec& category_spec() const { return category_spec_; }

  // Inference-time encodings (no dropout).
  Matrix encode_global() const;
  Matrix encode_category() const;

 private:
  const Dataset& dataset_;
  const HeteroGraph& graph_;
  const NormalizedAdjacency& adjacency_;
  BranchSpec global_spec_;
  BranchSpec category_spec_;
  int category_dim_ = 0;
  double lambda_ = 0.0;
  double alpha_ = 1.0;
  double dropout_p_ = 0.0;
  Matrix global_weights_;
  Matrix category_weights_;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double learning_rate = 0.0;
};

// Shared BPR loop: per-epoch negative resampling, shuffled mini-batches,
// Adam, and the staged learning-rate schedule. Deterministic given the seed.
std::vector<EpochRecord> train_bpr(BprObjective& objective,
                                   const Dataset& dataset,
                                   const TrainConfig& config);

}  // namespace pup
