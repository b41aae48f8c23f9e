#pragma once

#include <map>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "evaluation.hpp"
#include "model.hpp"
#include "synthetic.hpp"
#include "training.hpp"

namespace pup {

// Everything a command run needs, resolved from defaults, an optional
// `key = value` config file, and command-line overrides (in that order of
// increasing precedence).
struct RunConfig {
  std::string interactions_path;
  std::string catalog_path;
  std::string dataset_path;
  std::string checkpoint_path;
  std::string out_dir = ".";

  int levels = 10;
  Quantizer quantizer = Quantizer::uniform;
  bool synthetic = false;
  int synthetic_users = 200;
  int synthetic_items = 500;
  int synthetic_categories = 5;
  int synthetic_interactions_per_user = 30;

  Variant variant = Variant::pup;
  TrainConfig train;
  // The encoder applies a single convolution; the knob exists so configs
  // state it explicitly.
  int conv_layers = 1;

  std::vector<int> ks = {50, 100};
  Protocol protocol = Protocol::standard;
  // Negative disables the entropy-group breakdown.
  double entropy_threshold = -1.0;
  bool per_user_csv = false;
  int threads = 1;

  bool entropy_groups_enabled() const { return entropy_threshold >= 0.0; }
  SyntheticSpec synthetic_spec() const;
};

// Insertion order is irrelevant; std::map keeps echoes alphabetical.
using KeyValues = std::map<std::string, std::string>;

// Parses `key = value` lines. Blank lines and lines starting with '#' are
// skipped. Errors carry path and line number.
KeyValues parse_config_file(const std::string& path);

// Applies `file_values` then `overrides` on top of the defaults. Unknown
// keys and malformed values are hard errors.
RunConfig resolve_config(const KeyValues& file_values,
                         const KeyValues& overrides);

// The full resolved configuration as canonical key/value text, echoed into
// run manifests.
KeyValues config_echo(const RunConfig& config);

}  // namespace pup
