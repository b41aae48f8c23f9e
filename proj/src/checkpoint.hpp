#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "training.hpp"

namespace pup {

// On-disk model container: the magic string "PUPCKPT1", a little-endian
// 64-bit JSON header length, the JSON header (variant, seed, config echo,
// dataset shape, matrix descriptors), then all parameter matrices row-major
// as little-endian 64-bit floats in descriptor order.
struct Checkpoint {
  Variant variant = Variant::pup;
  std::uint64_t seed = 0;
  TrainConfig config;
  int users = 0;
  int items = 0;
  int categories = 0;
  int levels = 0;
  std::vector<std::pair<std::string, Matrix>> matrices;
};

void save_checkpoint(const std::string& path, const RankingModel& model,
                     const TrainConfig& config);

Checkpoint read_checkpoint(const std::string& path);

// Reads a checkpoint and rebuilds the model against `dataset`, which must
// match the shape recorded at save time.
std::unique_ptr<RankingModel> load_model(const std::string& path,
                                         const Dataset& dataset);

}  // namespace pup
