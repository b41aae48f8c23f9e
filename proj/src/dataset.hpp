#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pup {

struct RawInteraction {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;
};

struct CatalogEntry {
  std::string item_id;
  std::string category_id;
  double price = 0.0;
};

struct RawData {
  std::vector<RawInteraction> interactions;
  std::vector<CatalogEntry> catalog;
};

enum class Quantizer { uniform, rank };

Quantizer parse_quantizer(std::string_view name);
std::string_view quantizer_name(Quantizer q);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

// Indexed, split, quantized view of the raw data. Users are indexed by first
// appearance in the interaction file, items and categories by catalog order,
// so rebuilding from the same files is bit-identical.
struct Dataset {
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<std::string> category_ids;
  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;
  std::unordered_map<std::string, int> category_index;

  int price_level_count = 0;
  Quantizer quantizer = Quantizer::uniform;
  std::vector<int> item_category;     // size N
  std::vector<int> item_price_level;  // size N, values in [0, L)
  std::vector<double> item_price;     // size N, raw catalog price

  // (user, item) index pairs; duplicates preserved.
  std::vector<std::pair<int, int>> train;
  std::vector<std::pair<int, int>> validation;
  std::vector<std::pair<int, int>> test;

  int user_count() const { return static_cast<int>(user_ids.size()); }
  int item_count() const { return static_cast<int>(item_ids.size()); }
  int category_count() const { return static_cast<int>(category_ids.size()); }
};

// Reads the two CSVs. Hard errors: malformed rows (with line numbers),
// duplicate catalog item, interaction referencing an item absent from the
// catalog.
RawData load_dataset(const std::string& interactions_path,
                     const std::string& catalog_path);

struct InteractionSplits {
  std::vector<RawInteraction> train;
  std::vector<RawInteraction> validation;
  std::vector<RawInteraction> test;
};

// Stable sort by timestamp (ties keep input order), then cut at
// floor(0.6 n) / floor(0.2 n) / remainder.
InteractionSplits chronological_split(std::vector<RawInteraction> interactions,
                                      SplitRatios ratios = {});

// floor((price - cat_min) / (cat_max - cat_min) * levels), clamped to
// levels-1 at the top of the range; 0 when the category has a single price.
int quantize_uniform(double price, double cat_min, double cat_max, int levels);

// Ranks (item, price) pairs ascending by price (ties by item key) and maps
// rank r of n to floor(levels * r / n).
std::unordered_map<int, int> quantize_rank(
    std::vector<std::pair<int, double>> category_prices, int levels);

Dataset build_dataset(const RawData& raw, int levels, Quantizer quantizer);

// Per-category maximum price level over the user's training interactions.
std::map<int, int> compute_cwtp(const Dataset& dataset, int user);

// One pass over the train split: the profile above for every user. Users
// without training history get an empty map.
std::vector<std::map<int, int>> compute_all_cwtp(const Dataset& dataset);

// Shannon entropy (nats) of the empirical distribution of the CWTP levels.
double cwtp_entropy(const std::map<int, int>& cwtp);

void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset_bundle(const std::string& path);

}  // namespace pup
