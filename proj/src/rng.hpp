#pragma once

#include <cstdint>
#include <string_view>

namespace pup {

std::uint64_t splitmix64(std::uint64_t x);

// Named sub-stream seeds, so that e.g. negative sampling and embedding init
// draw from unrelated streams of the same master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

// xoshiro256++ seeded through splitmix64. All randomness in the project goes
// through this class: the std engines and distributions are not pinned by the
// standard, and results have to be reproducible from a single seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // [0, 1)
  double next_double();

  // [0, bound), bound > 0
  std::uint64_t next_below(std::uint64_t bound);

  double next_uniform(double lo, double hi);

  bool next_bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace pup
