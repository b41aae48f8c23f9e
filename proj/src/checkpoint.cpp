#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "error.hpp"

namespace pup {

namespace {

constexpr char kMagic[8] = {'P', 'U', 'P', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::string& out, std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>((value >> (8 * b)) & 0xff));
  }
}

std::uint64_t get_u64(const std::string& data, std::size_t offset) {
  std::uint64_t value = 0;
  for (int b = 0; b < 8; ++b) {
    value |= static_cast<std::uint64_t>(
                 static_cast<unsigned char>(data[offset + b]))
             << (8 * b);
  }
  return value;
}

nlohmann::ordered_json config_to_json(const TrainConfig& config) {
  nlohmann::ordered_json j;
  j["total_dim"] = config.total_dim;
  j["dim_global"] = config.dim_global;
  j["dim_category"] = config.dim_category;
  j["learning_rate"] = config.learning_rate;
  j["batch_size"] = config.batch_size;
  j["epochs"] = config.epochs;
  j["neg_rate"] = config.neg_rate;
  j["lambda_reg"] = config.lambda_reg;
  j["alpha"] = config.alpha;
  j["dropout_p"] = config.dropout_p;
  j["seed"] = config.seed;
  j["lr_decay_epoch1"] = config.lr_decay_epoch1;
  j["lr_decay_epoch2"] = config.lr_decay_epoch2;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  TrainConfig config;
  config.total_dim = j.at("total_dim").get<int>();
  config.dim_global = j.at("dim_global").get<int>();
  config.dim_category = j.at("dim_category").get<int>();
  config.learning_rate = j.at("learning_rate").get<double>();
  config.batch_size = j.at("batch_size").get<int>();
  config.epochs = j.at("epochs").get<int>();
  config.neg_rate = j.at("neg_rate").get<int>();
  config.lambda_reg = j.at("lambda_reg").get<double>();
  config.alpha = j.at("alpha").get<double>();
  config.dropout_p = j.at("dropout_p").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.lr_decay_epoch1 = j.at("lr_decay_epoch1").get<int>();
  config.lr_decay_epoch2 = j.at("lr_decay_epoch2").get<int>();
  return config;
}

}  // namespace

void save_checkpoint(const std::string& path, const RankingModel& model,
                     const TrainConfig& config) {
  const Dataset& ds = model.dataset();
  const auto matrices = model.parameter_matrices();

  nlohmann::ordered_json header;
  header["variant"] = std::string(variant_name(model.variant()));
  header["seed"] = config.seed;
  header["config"] = config_to_json(config);
  header["dataset"] = {{"users", ds.user_count()},
                       {"items", ds.item_count()},
                       {"categories", ds.category_count()},
                       {"levels", ds.price_level_count}};
  auto& descriptors = header["matrices"] = nlohmann::ordered_json::array();
  for (const auto& [name, matrix] : matrices) {
    descriptors.push_back(
        {{"name", name}, {"rows", matrix->rows()}, {"cols", matrix->cols()}});
  }
  const std::string header_text = header.dump();

  std::string blob;
  blob.reserve(16 + header_text.size());
  blob.append(kMagic, sizeof(kMagic));
  put_u64(blob, header_text.size());
  blob += header_text;
  for (const auto& [name, matrix] : matrices) {
    for (double value : matrix->flat()) {
      put_u64(blob, std::bit_cast<std::uint64_t>(value));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open checkpoint " + path);
  std::string blob{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};

  if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::parse, path + ": not a PUPCKPT1 checkpoint");
  }
  const std::uint64_t header_len = get_u64(blob, 8);
  if (16 + header_len > blob.size()) {
    fail(ErrorCode::parse, path + ": truncated checkpoint header");
  }

  Checkpoint ckpt;
  std::size_t payload = 0;
  std::vector<std::pair<std::string, std::pair<int, int>>> shapes;
  try {
    const auto header =
        nlohmann::json::parse(blob.substr(16, header_len));
    ckpt.variant = parse_variant(header.at("variant").get<std::string>());
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.config = config_from_json(header.at("config"));
    const auto& shape = header.at("dataset");
    ckpt.users = shape.at("users").get<int>();
    ckpt.items = shape.at("items").get<int>();
    ckpt.categories = shape.at("categories").get<int>();
    ckpt.levels = shape.at("levels").get<int>();
    for (const auto& desc : header.at("matrices")) {
      const int rows = desc.at("rows").get<int>();
      const int cols = desc.at("cols").get<int>();
      if (rows < 0 || cols < 0) {
        fail(ErrorCode::parse, path + ": negative matrix shape");
      }
      shapes.emplace_back(desc.at("name").get<std::string>(),
                          std::make_pair(rows, cols));
      payload += static_cast<std::size_t>(rows) * cols;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::parse, path + ": bad checkpoint header: " + e.what());
  }

  if (blob.size() != 16 + header_len + payload * 8) {
    fail(ErrorCode::parse, path + ": checkpoint payload size mismatch");
  }
  std::size_t offset = 16 + header_len;
  for (const auto& [name, shape] : shapes) {
    Matrix matrix(shape.first, shape.second);
    for (double& value : matrix.flat()) {
      value = std::bit_cast<double>(get_u64(blob, offset));
      offset += 8;
    }
    ckpt.matrices.emplace_back(name, std::move(matrix));
  }
  return ckpt;
}

std::unique_ptr<RankingModel> load_model(const std::string& path,
                                         const Dataset& dataset) {
  Checkpoint ckpt = read_checkpoint(path);
  if (ckpt.users != dataset.user_count() || ckpt.items != dataset.item_count() ||
      ckpt.categories != dataset.category_count() ||
      ckpt.levels != dataset.price_level_count) {
    fail(ErrorCode::mismatch,
         path + ": checkpoint was saved for a dataset of " +
             std::to_string(ckpt.users) + " users / " +
             std::to_string(ckpt.items) + " items / " +
             std::to_string(ckpt.categories) + " categories / " +
             std::to_string(ckpt.levels) + " levels");
  }
  return model_from_parameters(dataset, ckpt.config, ckpt.variant,
                               std::move(ckpt.matrices));
}

}  // namespace pup
