#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"

namespace pup {

namespace {

using ordered_json = nlohmann::ordered_json;

std::int64_t parse_int64(const std::string& field, const std::string& where) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    fail(ErrorCode::parse, where + ": bad integer '" + field + "'");
  }
  return value;
}

double parse_double(const std::string& field, const std::string& where) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    fail(ErrorCode::parse, where + ": bad number '" + field + "'");
  }
  return value;
}

std::string at_line(const std::string& path, int line) {
  return path + ":" + std::to_string(line);
}

}  // namespace

Quantizer parse_quantizer(std::string_view name) {
  if (name == "uniform") return Quantizer::uniform;
  if (name == "rank") return Quantizer::rank;
  fail(ErrorCode::invalid_argument,
       "unknown quantizer '" + std::string(name) + "' (expected uniform|rank)");
}

std::string_view quantizer_name(Quantizer q) {
  return q == Quantizer::uniform ? "uniform" : "rank";
}

RawData load_dataset(const std::string& interactions_path,
                     const std::string& catalog_path) {
  RawData raw;

  auto catalog_rows = read_csv(catalog_path, {"item_id", "category_id", "price"});
  std::unordered_map<std::string, int> seen_items;
  for (const auto& row : catalog_rows) {
    const auto where = at_line(catalog_path, row.line);
    CatalogEntry entry;
    entry.item_id = row.fields[0];
    entry.category_id = row.fields[1];
    entry.price = parse_double(row.fields[2], where);
    if (entry.item_id.empty()) fail(ErrorCode::parse, where + ": empty item_id");
    if (entry.category_id.empty())
      fail(ErrorCode::parse, where + ": empty category_id");
    if (entry.price < 0.0)
      fail(ErrorCode::parse, where + ": negative price " + row.fields[2]);
    auto [it, inserted] = seen_items.emplace(entry.item_id, row.line);
    if (!inserted) {
      fail(ErrorCode::parse, where + ": duplicate item '" + entry.item_id +
                                 "' (first at line " + std::to_string(it->second) +
                                 ")");
    }
    raw.catalog.push_back(std::move(entry));
  }

  auto rows = read_csv(interactions_path, {"user_id", "item_id", "timestamp"});
  for (const auto& row : rows) {
    const auto where = at_line(interactions_path, row.line);
    RawInteraction rec;
    rec.user_id = row.fields[0];
    rec.item_id = row.fields[1];
    rec.timestamp = parse_int64(row.fields[2], where);
    if (rec.user_id.empty()) fail(ErrorCode::parse, where + ": empty user_id");
    if (rec.item_id.empty()) fail(ErrorCode::parse, where + ": empty item_id");
    if (rec.timestamp < 0)
      fail(ErrorCode::parse, where + ": negative timestamp");
    if (!seen_items.count(rec.item_id)) {
      fail(ErrorCode::parse, where + ": item '" + rec.item_id +
                                 "' is not in the catalog");
    }
    raw.interactions.push_back(std::move(rec));
  }
  return raw;
}

InteractionSplits chronological_split(std::vector<RawInteraction> interactions,
                                      SplitRatios ratios) {
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9) {
    fail(ErrorCode::invalid_argument, "split ratios must sum to 1");
  }
  if (interactions.empty()) {
    fail(ErrorCode::invalid_argument, "cannot split an empty interaction list");
  }
  std::stable_sort(interactions.begin(), interactions.end(),
                   [](const RawInteraction& a, const RawInteraction& b) {
                     return a.timestamp < b.timestamp;
                   });
  const auto n = interactions.size();
  const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n));
  const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * n));

  InteractionSplits splits;
  splits.train.assign(interactions.begin(), interactions.begin() + n_train);
  splits.validation.assign(interactions.begin() + n_train,
                           interactions.begin() + n_train + n_val);
  splits.test.assign(interactions.begin() + n_train + n_val, interactions.end());
  return splits;
}

int quantize_uniform(double price, double cat_min, double cat_max, int levels) {
  if (levels < 2) fail(ErrorCode::invalid_argument, "levels must be >= 2");
  if (price < cat_min || price > cat_max) {
    fail(ErrorCode::invalid_argument,
         "price " + std::to_string(price) + " outside [" +
             std::to_string(cat_min) + ", " + std::to_string(cat_max) + "]");
  }
  if (cat_min == cat_max) return 0;
  const int level =
      static_cast<int>(std::floor((price - cat_min) / (cat_max - cat_min) * levels));
  return std::min(level, levels - 1);
}

std::unordered_map<int, int> quantize_rank(
    std::vector<std::pair<int, double>> category_prices, int levels) {
  if (levels < 2) fail(ErrorCode::invalid_argument, "levels must be >= 2");
  if (category_prices.empty()) {
    fail(ErrorCode::invalid_argument, "quantize_rank needs at least one item");
  }
  std::sort(category_prices.begin(), category_prices.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  const auto n = category_prices.size();
  std::unordered_map<int, int> levels_by_item;
  levels_by_item.reserve(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const int level = static_cast<int>(
        static_cast<std::size_t>(levels) * rank / n);
    levels_by_item[category_prices[rank].first] = std::min(level, levels - 1);
  }
  return levels_by_item;
}

Dataset build_dataset(const RawData& raw, int levels, Quantizer quantizer) {
  if (levels < 2) fail(ErrorCode::invalid_argument, "levels must be >= 2");

  Dataset ds;
  ds.price_level_count = levels;
  ds.quantizer = quantizer;

  for (const auto& entry : raw.catalog) {
    if (ds.item_index.count(entry.item_id)) {
      fail(ErrorCode::parse, "duplicate catalog item '" + entry.item_id + "'");
    }
    const int idx = static_cast<int>(ds.item_ids.size());
    ds.item_index.emplace(entry.item_id, idx);
    ds.item_ids.push_back(entry.item_id);
    auto [cat_it, inserted] =
        ds.category_index.emplace(entry.category_id,
                                  static_cast<int>(ds.category_ids.size()));
    if (inserted) ds.category_ids.push_back(entry.category_id);
    ds.item_category.push_back(cat_it->second);
    ds.item_price.push_back(entry.price);
  }

  // Price levels are assigned within each category.
  ds.item_price_level.assign(ds.item_count(), 0);
  std::vector<std::vector<std::pair<int, double>>> by_category(ds.category_count());
  for (int i = 0; i < ds.item_count(); ++i) {
    by_category[ds.item_category[i]].emplace_back(i, ds.item_price[i]);
  }
  for (const auto& items : by_category) {
    if (items.empty()) continue;
    if (quantizer == Quantizer::uniform) {
      double lo = items[0].second, hi = items[0].second;
      for (const auto& [_, price] : items) {
        lo = std::min(lo, price);
        hi = std::max(hi, price);
      }
      for (const auto& [item, price] : items) {
        ds.item_price_level[item] = quantize_uniform(price, lo, hi, levels);
      }
    } else {
      for (const auto& [item, level] : quantize_rank(items, levels)) {
        ds.item_price_level[item] = level;
      }
    }
  }

  for (const auto& rec : raw.interactions) {
    if (!ds.item_index.count(rec.item_id)) {
      fail(ErrorCode::parse,
           "interaction references item '" + rec.item_id + "' not in catalog");
    }
    auto [it, inserted] =
        ds.user_index.emplace(rec.user_id, static_cast<int>(ds.user_ids.size()));
    if (inserted) ds.user_ids.push_back(rec.user_id);
  }

  if (!raw.interactions.empty()) {
    auto splits = chronological_split(raw.interactions);
    auto to_pairs = [&](const std::vector<RawInteraction>& recs) {
      std::vector<std::pair<int, int>> pairs;
      pairs.reserve(recs.size());
      for (const auto& rec : recs) {
        pairs.emplace_back(ds.user_index.at(rec.user_id),
                           ds.item_index.at(rec.item_id));
      }
      return pairs;
    };
    ds.train = to_pairs(splits.train);
    ds.validation = to_pairs(splits.validation);
    ds.test = to_pairs(splits.test);
  }
  return ds;
}

std::map<int, int> compute_cwtp(const Dataset& dataset, int user) {
  std::map<int, int> cwtp;
  for (const auto& [u, i] : dataset.train) {
    if (u != user) continue;
    const int cat = dataset.item_category[i];
    const int level = dataset.item_price_level[i];
    auto [it, inserted] = cwtp.emplace(cat, level);
    if (!inserted) it->second = std::max(it->second, level);
  }
  if (cwtp.empty()) {
    fail(ErrorCode::invalid_argument,
         "user " + std::to_string(user) + " has no training interactions");
  }
  return cwtp;
}

std::vector<std::map<int, int>> compute_all_cwtp(const Dataset& dataset) {
  std::vector<std::map<int, int>> profiles(dataset.user_count());
  for (const auto& [u, i] : dataset.train) {
    const int cat = dataset.item_category[i];
    const int level = dataset.item_price_level[i];
    auto [it, inserted] = profiles[u].emplace(cat, level);
    if (!inserted) it->second = std::max(it->second, level);
  }
  return profiles;
}

double cwtp_entropy(const std::map<int, int>& cwtp) {
  if (cwtp.empty()) {
    fail(ErrorCode::invalid_argument, "CWTP map must be non-empty");
  }
  std::map<int, int> counts;
  for (const auto& [_, level] : cwtp) counts[level] += 1;
  const double n = static_cast<double>(cwtp.size());
  double entropy = 0.0;
  for (const auto& [_, count] : counts) {
    const double p = count / n;
    entropy -= p * std::log(p);
  }
  return std::max(entropy, 0.0);
}

void save_dataset(const Dataset& ds, const std::string& path) {
  ordered_json j;
  j["format"] = "pup-dataset-v1";
  j["price_level_count"] = ds.price_level_count;
  j["quantizer"] = std::string(quantizer_name(ds.quantizer));
  j["user_ids"] = ds.user_ids;
  j["item_ids"] = ds.item_ids;
  j["category_ids"] = ds.category_ids;
  j["item_category"] = ds.item_category;
  j["item_price_level"] = ds.item_price_level;
  j["item_price"] = ds.item_price;
  auto pairs = [](const std::vector<std::pair<int, int>>& split) {
    ordered_json arr = ordered_json::array();
    for (const auto& [u, i] : split) arr.push_back(ordered_json::array({u, i}));
    return arr;
  };
  j["train"] = pairs(ds.train);
  j["validation"] = pairs(ds.validation);
  j["test"] = pairs(ds.test);

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

Dataset load_dataset_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "pup-dataset-v1") {
      fail(ErrorCode::parse, path + ": unknown bundle format");
    }
    Dataset ds;
    ds.price_level_count = j.at("price_level_count").get<int>();
    ds.quantizer = parse_quantizer(j.at("quantizer").get<std::string>());
    ds.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    ds.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    ds.category_ids = j.at("category_ids").get<std::vector<std::string>>();
    ds.item_category = j.at("item_category").get<std::vector<int>>();
    ds.item_price_level = j.at("item_price_level").get<std::vector<int>>();
    ds.item_price = j.at("item_price").get<std::vector<double>>();
    auto pairs = [&](const char* key) {
      std::vector<std::pair<int, int>> split;
      for (const auto& entry : j.at(key)) {
        split.emplace_back(entry.at(0).get<int>(), entry.at(1).get<int>());
      }
      return split;
    };
    ds.train = pairs("train");
    ds.validation = pairs("validation");
    ds.test = pairs("test");
    for (int i = 0; i < ds.user_count(); ++i) ds.user_index[ds.user_ids[i]] = i;
    for (int i = 0; i < ds.item_count(); ++i) ds.item_index[ds.item_ids[i]] = i;
    for (int i = 0; i < ds.category_count(); ++i)
      ds.category_index[ds.category_ids[i]] = i;
    return ds;
  } catch (const PupError&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

}  // namespace pup
