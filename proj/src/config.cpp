#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "error.hpp"
#include "format.hpp"

namespace pup {

SyntheticSpec RunConfig::synthetic_spec() const {
  SyntheticSpec spec;
  spec.users = synthetic_users;
  spec.items = synthetic_items;
  spec.categories = synthetic_categories;
  spec.levels = levels;
  spec.interactions_per_user = synthetic_interactions_per_user;
  spec.seed = train.seed;
  return spec;
}

namespace {

std::string trim(std::string_view text) {
  const auto begin = text.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  const auto end = text.find_last_not_of(" \t");
  return std::string(text.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T parsed{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::parse, "config key '" + key + "': bad value '" + value + "'");
  }
  return parsed;
}

double parse_real(const std::string& key, const std::string& value) {
  // from_chars for doubles is incomplete on older libstdc++, so go through
  // strtod with a whole-string check.
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    fail(ErrorCode::parse, "config key '" + key + "': bad value '" + value + "'");
  }
  return parsed;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(ErrorCode::parse,
       "config key '" + key + "': expected true or false, got '" + value + "'");
}

void parse_dim_split(const std::string& value, TrainConfig& train) {
  const auto slash = value.find('/');
  if (slash == std::string::npos) {
    fail(ErrorCode::parse,
         "config key 'dim_split': expected m/n, got '" + value + "'");
  }
  train.dim_global = parse_number<int>("dim_split", value.substr(0, slash));
  train.dim_category = parse_number<int>("dim_split", value.substr(slash + 1));
  train.total_dim = train.dim_global + train.dim_category;
}

std::vector<int> parse_k_list(const std::string& value) {
  std::vector<int> ks;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto piece = trim(value.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    ks.push_back(parse_number<int>("k", piece));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return ks;
}

void apply(RunConfig& config, const std::string& key,
           const std::string& value) {
  if (key == "interactions") {
    config.interactions_path = value;
  } else if (key == "catalog") {
    config.catalog_path = value;
  } else if (key == "dataset") {
    config.dataset_path = value;
  } else if (key == "checkpoint") {
    config.checkpoint_path = value;
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "levels") {
    config.levels = parse_number<int>(key, value);
  } else if (key == "quantizer") {
    config.quantizer = parse_quantizer(value);
  } else if (key == "synthetic") {
    config.synthetic = parse_bool(key, value);
  } else if (key == "synthetic_users") {
    config.synthetic_users = parse_number<int>(key, value);
  } else if (key == "synthetic_items") {
    config.synthetic_items = parse_number<int>(key, value);
  } else if (key == "synthetic_categories") {
    config.synthetic_categories = parse_number<int>(key, value);
  } else if (key == "synthetic_interactions_per_user") {
    config.synthetic_interactions_per_user = parse_number<int>(key, value);
  } else if (key == "variant") {
    config.variant = parse_variant(value);
  } else if (key == "dim_split") {
    parse_dim_split(value, config.train);
  } else if (key == "learning_rate") {
    config.train.learning_rate = parse_real(key, value);
  } else if (key == "batch_size") {
    config.train.batch_size = parse_number<int>(key, value);
  } else if (key == "epochs") {
    config.train.epochs = parse_number<int>(key, value);
  } else if (key == "neg_rate") {
    config.train.neg_rate = parse_number<int>(key, value);
  } else if (key == "lambda_reg") {
    config.train.lambda_reg = parse_real(key, value);
  } else if (key == "alpha") {
    config.train.alpha = parse_real(key, value);
  } else if (key == "dropout_p") {
    config.train.dropout_p = parse_real(key, value);
  } else if (key == "seed") {
    config.train.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "lr_decay_epoch1") {
    config.train.lr_decay_epoch1 = parse_number<int>(key, value);
  } else if (key == "lr_decay_epoch2") {
    config.train.lr_decay_epoch2 = parse_number<int>(key, value);
  } else if (key == "conv_layers") {
    config.conv_layers = parse_number<int>(key, value);
  } else if (key == "k") {
    config.ks = parse_k_list(value);
  } else if (key == "protocol") {
    config.protocol = parse_protocol(value);
  } else if (key == "entropy_threshold") {
    config.entropy_threshold = parse_real(key, value);
  } else if (key == "per_user_csv") {
    config.per_user_csv = parse_bool(key, value);
  } else if (key == "threads") {
    config.threads = parse_number<int>(key, value);
  } else {
    fail(ErrorCode::parse, "unknown config key '" + key + "'");
  }
}

void validate(const RunConfig& config) {
  if (config.levels < 1) {
    fail(ErrorCode::invalid_argument, "levels must be at least 1");
  }
  if (config.threads < 1) {
    fail(ErrorCode::invalid_argument, "threads must be at least 1");
  }
  if (config.conv_layers != 1) {
    fail(ErrorCode::invalid_argument,
         "conv_layers must be 1: the encoder applies exactly one "
         "convolution layer");
  }
  if (config.ks.empty()) {
    fail(ErrorCode::invalid_argument, "k list must not be empty");
  }
  for (int k : config.ks) {
    if (k < 1) fail(ErrorCode::invalid_argument, "k values must be at least 1");
  }
  if (config.synthetic_users < 1 || config.synthetic_items < 1 ||
      config.synthetic_categories < 1 ||
      config.synthetic_interactions_per_user < 1) {
    fail(ErrorCode::invalid_argument, "synthetic sizes must be at least 1");
  }
}

}  // namespace

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config file " + path);
  KeyValues values;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_number) +
                                 ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      fail(ErrorCode::parse,
           path + ":" + std::to_string(line_number) + ": empty key");
    }
    if (!values.emplace(key, value).second) {
      fail(ErrorCode::parse, path + ":" + std::to_string(line_number) +
                                 ": duplicate key '" + key + "'");
    }
  }
  return values;
}

RunConfig resolve_config(const KeyValues& file_values,
                         const KeyValues& overrides) {
  RunConfig config;
  for (const auto& [key, value] : file_values) apply(config, key, value);
  for (const auto& [key, value] : overrides) apply(config, key, value);
  validate(config);
  return config;
}

KeyValues config_echo(const RunConfig& config) {
  KeyValues echo;
  echo["interactions"] = config.interactions_path;
  echo["catalog"] = config.catalog_path;
  echo["dataset"] = config.dataset_path;
  echo["checkpoint"] = config.checkpoint_path;
  echo["out"] = config.out_dir;
  echo["levels"] = std::to_string(config.levels);
  echo["quantizer"] = std::string(quantizer_name(config.quantizer));
  echo["synthetic"] = config.synthetic ? "true" : "false";
  echo["synthetic_users"] = std::to_string(config.synthetic_users);
  echo["synthetic_items"] = std::to_string(config.synthetic_items);
  echo["synthetic_categories"] = std::to_string(config.synthetic_categories);
  echo["synthetic_interactions_per_user"] =
      std::to_string(config.synthetic_interactions_per_user);
  echo["variant"] = std::string(variant_name(config.variant));
  echo["dim_split"] = std::to_string(config.train.dim_global) + "/" +
                      std::to_string(config.train.dim_category);
  echo["learning_rate"] = format_double(config.train.learning_rate);
  echo["batch_size"] = std::to_string(config.train.batch_size);
  echo["epochs"] = std::to_string(config.train.epochs);
  echo["neg_rate"] = std::to_string(config.train.neg_rate);
  echo["lambda_reg"] = format_double(config.train.lambda_reg);
  echo["alpha"] = format_double(config.train.alpha);
  echo["dropout_p"] = format_double(config.train.dropout_p);
  echo["seed"] = std::to_string(config.train.seed);
  echo["lr_decay_epoch1"] = std::to_string(config.train.lr_decay_epoch1);
  echo["lr_decay_epoch2"] = std::to_string(config.train.lr_decay_epoch2);
  echo["conv_layers"] = std::to_string(config.conv_layers);
  std::string k_list;
  for (std::size_t i = 0; i < config.ks.size(); ++i) {
    if (i) k_list += ",";
    k_list += std::to_string(config.ks[i]);
  }
  echo["k"] = k_list;
  echo["protocol"] = std::string(protocol_name(config.protocol));
  echo["entropy_threshold"] = format_double(config.entropy_threshold);
  echo["per_user_csv"] = config.per_user_csv ? "true" : "false";
  echo["threads"] = std::to_string(config.threads);
  return echo;
}

}  // namespace pup
