#include "synthetic.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace pup {

namespace {

struct Band {
  int lo = 0;
  int hi = 0;
  bool contains(int level) const { return level >= lo && level <= hi; }
};

}  // namespace

SyntheticData generate_synthetic_raw(const SyntheticSpec& spec) {
  if (spec.users < 1 || spec.items < 1 || spec.categories < 1 ||
      spec.levels < 1 || spec.interactions_per_user < 1) {
    fail(ErrorCode::invalid_argument, "synthetic sizes must be at least 1");
  }
  if (spec.items < spec.categories) {
    fail(ErrorCode::invalid_argument,
         "need at least one item per category");
  }
  Rng rng(derive_seed(spec.seed, "synthetic"));

  SyntheticData data;
  data.raw.catalog.reserve(spec.items);
  // Item j sits in category j mod C at price slot (j div C) mod L, so every
  // (category, level) cell is occupied once items >= C * L and the uniform
  // quantizer recovers the planted slots exactly.
  std::vector<int> item_level(spec.items);
  std::vector<std::vector<int>> items_of_category(spec.categories);
  std::vector<std::vector<std::vector<int>>> items_by_level(
      spec.categories,
      std::vector<std::vector<int>>(spec.levels));
  for (int j = 0; j < spec.items; ++j) {
    const int cat = j % spec.categories;
    const int level = (j / spec.categories) % spec.levels;
    item_level[j] = level;
    items_of_category[cat].push_back(j);
    items_by_level[cat][level].push_back(j);
    data.raw.catalog.push_back({"i" + std::to_string(j),
                                "c" + std::to_string(cat),
                                10.0 * (level + 1)});
  }

  // Two preferred categories per user (possibly coinciding) and one
  // acceptable price band per (user, category), three levels wide.
  std::vector<std::pair<int, int>> preferred(spec.users);
  std::vector<std::vector<Band>> bands(spec.users,
                                       std::vector<Band>(spec.categories));
  for (int u = 0; u < spec.users; ++u) {
    preferred[u] = {u % spec.categories,
                    (u / spec.categories) % spec.categories};
    for (int c = 0; c < spec.categories; ++c) {
      const int center = static_cast<int>(rng.next_below(spec.levels));
      bands[u][c] = {std::max(0, center - 1),
                     std::min(spec.levels - 1, center + 1)};
    }
  }

  const long long total =
      static_cast<long long>(spec.users) * spec.interactions_per_user;
  data.raw.interactions.reserve(total);
  long long in_band = 0;
  for (long long t = 0; t < total; ++t) {
    const int u = static_cast<int>(t % spec.users);

    int cat;
    if (rng.next_bernoulli(0.9)) {
      cat = rng.next_bernoulli(0.5) ? preferred[u].first : preferred[u].second;
    } else {
      cat = static_cast<int>(rng.next_below(spec.categories));
    }

    const Band& band = bands[u][cat];
    int item = -1;
    if (rng.next_bernoulli(0.9)) {
      std::vector<int> pool;
      for (int level = band.lo; level <= band.hi; ++level) {
        const auto& bucket = items_by_level[cat][level];
        pool.insert(pool.end(), bucket.begin(), bucket.end());
      }
      if (!pool.empty()) {
        item = pool[rng.next_below(pool.size())];
      }
    }
    if (item < 0) {
      const auto& all = items_of_category[cat];
      item = all[rng.next_below(all.size())];
    }
    if (band.contains(item_level[item])) ++in_band;

    data.raw.interactions.push_back(
        {"u" + std::to_string(u), "i" + std::to_string(item), t});
  }
  data.in_band_fraction = static_cast<double>(in_band) / total;
  if (data.in_band_fraction < 0.5) {
    fail(ErrorCode::internal,
         "planted-band self-check failed: in-band fraction " +
             std::to_string(data.in_band_fraction));
  }
  return data;
}

Dataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  return build_dataset(generate_synthetic_raw(spec).raw, spec.levels,
                       Quantizer::uniform);
}

}  // namespace pup
