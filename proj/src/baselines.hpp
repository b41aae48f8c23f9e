#pragma once

#include <memory>

#include "model.hpp"
#include "training.hpp"

namespace pup {

// Popularity baseline: score(u, i) = training interaction count of item i,
// identical ranking for every user.
class ItemPopModel : public RankingModel {
 public:
  ItemPopModel(Dataset dataset, Matrix counts);

  Variant variant() const override { return Variant::itempop; }
  double score(int user, int item) const override;
  const Dataset& dataset() const override { return dataset_; }
  std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const override;

 private:
  Dataset dataset_;
  Matrix counts_;  // item_count x 1
};

std::unique_ptr<ItemPopModel> itempop_fit(const Dataset& dataset);

// Factorization baselines over one flat embedding table indexed like the
// graph's node space: users first, then items, then (for fm) categories and
// price levels. bprmf scores e_u . e_i; fm scores the pairwise sum over
// (user, item, category, price) rows.
class FlatEmbeddingModel : public RankingModel {
 public:
  FlatEmbeddingModel(Dataset dataset, Variant variant, Matrix table);

  Variant variant() const override { return variant_; }
  double score(int user, int item) const override;
  const Dataset& dataset() const override { return dataset_; }
  std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const override;

  static int table_rows(const Dataset& dataset, Variant variant);
  Matrix& table() { return table_; }

 private:
  Dataset dataset_;
  Variant variant_;
  Matrix table_;
};

// BPR objective for the flat models, shared by bprmf and fm.
class FlatObjective : public BprObjective {
 public:
  FlatObjective(const Dataset& dataset, const TrainConfig& config,
                Variant variant);

  std::vector<Matrix*> parameters() override;
  double batch_loss_and_gradients(std::span<const Triplet> batch,
                                  std::uint64_t dropout_seed, bool use_dropout,
                                  std::vector<Matrix>& grads) override;

  Matrix& table() { return table_; }
  std::vector<int> feature_rows(int user, int item) const;

 private:
  const Dataset& dataset_;
  Variant variant_;
  double lambda_;
  Matrix table_;
};

FitResult bprmf_fit(const Dataset& dataset, const TrainConfig& config);
FitResult fm_fit(const Dataset& dataset, const TrainConfig& config);

}  // namespace pup
