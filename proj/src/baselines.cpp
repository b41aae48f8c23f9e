#include "baselines.hpp"

#include <algorithm>
#include <cmath>

#include "encoder.hpp"
#include "error.hpp"

namespace pup {

namespace {

void check_pair(const Dataset& ds, int user, int item) {
  if (user < 0 || user >= ds.user_count()) {
    fail(ErrorCode::invalid_argument,
         "user index " + std::to_string(user) + " out of range");
  }
  if (item < 0 || item >= ds.item_count()) {
    fail(ErrorCode::invalid_argument,
         "item index " + std::to_string(item) + " out of range");
  }
}

std::vector<int> flat_feature_rows(const Dataset& ds, Variant variant, int user,
                                   int item) {
  check_pair(ds, user, item);
  const int m = ds.user_count(), n = ds.item_count(), c = ds.category_count();
  std::vector<int> rows = {user, m + item};
  if (variant == Variant::fm) {
    rows.push_back(m + n + ds.item_category[item]);
    rows.push_back(m + n + c + ds.item_price_level[item]);
  }
  return rows;
}

}  // namespace

ItemPopModel::ItemPopModel(Dataset dataset, Matrix counts)
    : dataset_(std::move(dataset)), counts_(std::move(counts)) {
  if (counts_.rows() != dataset_.item_count() || counts_.cols() != 1) {
    fail(ErrorCode::mismatch, "item count vector shape mismatch");
  }
}

double ItemPopModel::score(int user, int item) const {
  check_pair(dataset_, user, item);
  return counts_(item, 0);
}

std::vector<std::pair<std::string, const Matrix*>>
ItemPopModel::parameter_matrices() const {
  return {{"item_counts", &counts_}};
}

std::unique_ptr<ItemPopModel> itempop_fit(const Dataset& dataset) {
  Matrix counts(dataset.item_count(), 1);
  for (const auto& [u, i] : dataset.train) counts(i, 0) += 1.0;
  return std::make_unique<ItemPopModel>(dataset, std::move(counts));
}

int FlatEmbeddingModel::table_rows(const Dataset& dataset, Variant variant) {
  const int base = dataset.user_count() + dataset.item_count();
  if (variant == Variant::fm) {
    return base + dataset.category_count() + dataset.price_level_count;
  }
  return base;
}

FlatEmbeddingModel::FlatEmbeddingModel(Dataset dataset, Variant variant,
                                       Matrix table)
    : dataset_(std::move(dataset)), variant_(variant), table_(std::move(table)) {
  if (variant_ != Variant::bprmf && variant_ != Variant::fm) {
    fail(ErrorCode::invalid_argument,
         "flat embedding model only supports bprmf and fm");
  }
  if (table_.rows() != table_rows(dataset_, variant_)) {
    fail(ErrorCode::mismatch,
         "embedding table has " + std::to_string(table_.rows()) +
             " rows, expected " +
             std::to_string(table_rows(dataset_, variant_)));
  }
}

double FlatEmbeddingModel::score(int user, int item) const {
  auto rows = flat_feature_rows(dataset_, variant_, user, item);
  std::vector<std::span<const double>> vecs;
  vecs.reserve(rows.size());
  for (int r : rows) vecs.push_back(table_.row(r));
  return score_branch(vecs);
}

std::vector<std::pair<std::string, const Matrix*>>
FlatEmbeddingModel::parameter_matrices() const {
  return {{"table", &table_}};
}

FlatObjective::FlatObjective(const Dataset& dataset, const TrainConfig& config,
                             Variant variant)
    : dataset_(dataset), variant_(variant), lambda_(config.lambda_reg) {
  table_ = init_embeddings(FlatEmbeddingModel::table_rows(dataset, variant),
                           config.total_dim, derive_seed(config.seed, "init-table"));
}

std::vector<Matrix*> FlatObjective::parameters() { return {&table_}; }

std::vector<int> FlatObjective::feature_rows(int user, int item) const {
  return flat_feature_rows(dataset_, variant_, user, item);
}

double FlatObjective::batch_loss_and_gradients(std::span<const Triplet> batch,
                                               std::uint64_t, bool,
                                               std::vector<Matrix>& grads) {
  if (batch.empty()) fail(ErrorCode::invalid_argument, "empty batch");
  if (grads.size() != 1) {
    fail(ErrorCode::mismatch, "gradient buffer count mismatch");
  }
  Matrix& grad = grads[0];
  const int d = table_.cols();
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;

  std::vector<double> total_pos(d), total_neg(d);
  std::vector<int> touched;
  for (const Triplet& t : batch) {
    const auto rows_pos = feature_rows(t.user, t.pos);
    const auto rows_neg = feature_rows(t.user, t.neg);
    auto forward = [&](const std::vector<int>& rows,
                       std::vector<double>& total) {
      std::fill(total.begin(), total.end(), 0.0);
      double sum_sq = 0.0;
      for (int r : rows) {
        const auto row = table_.row(r);
        for (int k = 0; k < d; ++k) {
          total[k] += row[k];
          sum_sq += row[k] * row[k];
        }
      }
      double norm_sq = 0.0;
      for (int k = 0; k < d; ++k) norm_sq += total[k] * total[k];
      return 0.5 * (norm_sq - sum_sq);
    };
    const double s_pos = forward(rows_pos, total_pos);
    const double s_neg = forward(rows_neg, total_neg);
    loss += bpr_loss(s_pos, s_neg) * inv_b;
    const double gm = bpr_loss_margin_grad(s_pos - s_neg) * inv_b;

    for (int r : rows_pos) {
      const auto row = table_.row(r);
      auto g = grad.row(r);
      for (int k = 0; k < d; ++k) g[k] += gm * (total_pos[k] - row[k]);
    }
    for (int r : rows_neg) {
      const auto row = table_.row(r);
      auto g = grad.row(r);
      for (int k = 0; k < d; ++k) g[k] -= gm * (total_neg[k] - row[k]);
    }

    if (lambda_ > 0.0) {
      touched = rows_pos;
      touched.insert(touched.end(), rows_neg.begin(), rows_neg.end());
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (int r : touched) {
        const auto row = table_.row(r);
        auto g = grad.row(r);
        for (int k = 0; k < d; ++k) {
          loss += lambda_ * inv_b * row[k] * row[k];
          g[k] += 2.0 * lambda_ * inv_b * row[k];
        }
      }
    }
  }

  if (!std::isfinite(loss)) fail(ErrorCode::diverged, "loss is not finite");
  for (double v : grad.flat()) {
    if (!std::isfinite(v)) fail(ErrorCode::diverged, "gradient is not finite");
  }
  return loss;
}

namespace {

FitResult flat_fit(const Dataset& dataset, const TrainConfig& config,
                   Variant variant) {
  config.validate();
  FlatObjective objective(dataset, config, variant);
  auto history = train_bpr(objective, dataset, config);
  auto model = std::make_unique<FlatEmbeddingModel>(
      dataset, variant, std::move(objective.table()));
  return {std::move(model), std::move(history)};
}

}  // namespace

FitResult bprmf_fit(const Dataset& dataset, const TrainConfig& config) {
  return flat_fit(dataset, config, Variant::bprmf);
}

FitResult fm_fit(const Dataset& dataset, const TrainConfig& config) {
  return flat_fit(dataset, config, Variant::fm);
}

}  // namespace pup
