#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "dataset.hpp"
#include "error.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace pup::testing {

// Scorer with a hand-fixed user-by-item score table, for metric fixtures.
class TableScorer : public RankingModel {
 public:
  TableScorer(Dataset dataset, Matrix scores)
      : dataset_(std::move(dataset)), scores_(std::move(scores)) {
    if (scores_.rows() != dataset_.user_count() ||
        scores_.cols() != dataset_.item_count()) {
      fail(ErrorCode::invalid_argument, "score table shape mismatch");
    }
  }

  Variant variant() const override { return Variant::itempop; }
  double score(int user, int item) const override {
    return scores_(user, item);
  }
  const Dataset& dataset() const override { return dataset_; }
  std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const override {
    return {};
  }

 private:
  Dataset dataset_;
  Matrix scores_;
};

// Applies a transform to another model's scores, leaving ranks to the
// transform's monotonicity.
template <typename Fn>
class TransformedScorer : public RankingModel {
 public:
  TransformedScorer(const RankingModel& base, Fn fn)
      : base_(base), fn_(std::move(fn)) {}

  Variant variant() const override { return base_.variant(); }
  double score(int user, int item) const override {
    return fn_(base_.score(user, item));
  }
  const Dataset& dataset() const override { return base_.dataset(); }
  std::vector<std::pair<std::string, const Matrix*>> parameter_matrices()
      const override {
    return base_.parameter_matrices();
  }

 private:
  const RankingModel& base_;
  Fn fn_;
};

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 100; ++attempt) {
      auto candidate = base / ("pup-test-" + std::to_string(counter_++));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    fail(ErrorCode::io, "could not create a temp directory");
  }

  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Hand-assembled dataset for unit fixtures. Items take their price level as
// their raw price; ids are synthesized from indices.
inline Dataset manual_dataset(int users, int categories, int levels,
                              std::vector<int> item_category,
                              std::vector<int> item_price_level,
                              std::vector<std::pair<int, int>> train,
                              std::vector<std::pair<int, int>> validation = {},
                              std::vector<std::pair<int, int>> test = {}) {
  Dataset ds;
  ds.price_level_count = levels;
  for (int u = 0; u < users; ++u) {
    ds.user_index["u" + std::to_string(u)] = u;
    ds.user_ids.push_back("u" + std::to_string(u));
  }
  for (int c = 0; c < categories; ++c) {
    ds.category_index["c" + std::to_string(c)] = c;
    ds.category_ids.push_back("c" + std::to_string(c));
  }
  for (std::size_t i = 0; i < item_category.size(); ++i) {
    ds.item_index["i" + std::to_string(i)] = static_cast<int>(i);
    ds.item_ids.push_back("i" + std::to_string(i));
    ds.item_price.push_back(static_cast<double>(item_price_level[i]));
  }
  ds.item_category = std::move(item_category);
  ds.item_price_level = std::move(item_price_level);
  ds.train = std::move(train);
  ds.validation = std::move(validation);
  ds.test = std::move(test);
  return ds;
}

// Random dataset with every item priced and categorized, and enough
// interactions that each split is non-empty. Used by the property tests.
inline RawData random_raw_data(Rng& rng, int users, int items, int categories) {
  RawData raw;
  for (int i = 0; i < items; ++i) {
    CatalogEntry entry;
    entry.item_id = "i" + std::to_string(i);
    entry.category_id = "c" + std::to_string(rng.next_below(categories));
    entry.price = rng.next_uniform(1.0, 500.0);
    raw.catalog.push_back(entry);
  }
  const int count = 5 * users + 10;
  for (int k = 0; k < count; ++k) {
    RawInteraction rec;
    rec.user_id = "u" + std::to_string(rng.next_below(users));
    rec.item_id = "i" + std::to_string(rng.next_below(items));
    rec.timestamp = static_cast<std::int64_t>(rng.next_below(1000000));
    raw.interactions.push_back(rec);
  }
  return raw;
}

inline Dataset random_dataset(Rng& rng, int users, int items, int categories,
                              int levels,
                              Quantizer quantizer = Quantizer::uniform) {
  return build_dataset(random_raw_data(rng, users, items, categories), levels,
                       quantizer);
}

}  // namespace pup::testing
