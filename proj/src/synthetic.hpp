#pragma once

#include <cstdint>

#include "dataset.hpp"

namespace pup {

struct SyntheticSpec {
  int users = 200;
  int items = 500;
  int categories = 5;
  int levels = 10;
  int interactions_per_user = 30;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  RawData raw;
  // Fraction of generated interactions whose item price level falls inside
  // the band planted for that (user, category) pair.
  double in_band_fraction = 0.0;
};

// Plants a per-(user, category) acceptable price band and a small set of
// preferred categories per user, then samples interactions that mostly stay
// inside both. Timestamps interleave users round-robin, so a chronological
// split leaves every user with train, validation, and test interactions.
// Deterministic for a given spec.
SyntheticData generate_synthetic_raw(const SyntheticSpec& spec);

// The generated interactions built into an indexed dataset with uniform
// price quantization at `spec.levels`.
Dataset generate_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace pup
