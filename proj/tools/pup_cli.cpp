#include <CLI11.hpp>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <pup.h>

namespace {

struct StringOpt {
  const char* flag;
  const char* key;
  const char* desc;
};

// Every value flag funnels into the override map as text; the library
// parses and validates when the command runs, so file and flag values go
// through the same checks.
const std::vector<StringOpt> kValueFlags = {
    {"--interactions", "interactions", "raw interactions CSV"},
    {"--catalog", "catalog", "raw catalog CSV"},
    {"--dataset", "dataset", "prepared dataset bundle"},
    {"--checkpoint", "checkpoint", "model checkpoint path"},
    {"--out", "out", "output directory"},
    {"--seed", "seed", "master random seed"},
    {"--variant", "variant",
     "model variant: pup, pup-minus-category, pup-minus-price, "
     "pup-minus-both, itempop, bprmf, fm"},
    {"--levels", "levels", "number of price levels"},
    {"--quantizer", "quantizer", "price quantization: uniform or rank"},
    {"--alpha", "alpha", "category branch weight"},
    {"--dim-split", "dim_split", "embedding split as global/category, e.g. 48/16"},
    {"--k", "k", "comma-separated cutoffs, e.g. 50,100"},
    {"--protocol", "protocol", "evaluation protocol: standard, cir, or ucir"},
    {"--threads", "threads", "evaluation worker threads"},
    {"--epochs", "epochs", "training epochs"},
    {"--batch-size", "batch_size", "minibatch size"},
    {"--learning-rate", "learning_rate", "initial learning rate"},
    {"--neg-rate", "neg_rate", "negatives sampled per positive"},
    {"--lambda-reg", "lambda_reg", "L2 regularization strength"},
    {"--dropout", "dropout_p", "feature dropout probability"},
    {"--lr-decay-epoch1", "lr_decay_epoch1", "first decay epoch (-1 for default)"},
    {"--lr-decay-epoch2", "lr_decay_epoch2", "second decay epoch (-1 for default)"},
    {"--conv-layers", "conv_layers", "graph convolution layers (must be 1)"},
    {"--entropy-threshold", "entropy_threshold",
     "split metrics at this CWTP entropy (negative disables)"},
    {"--synthetic-users", "synthetic_users", "synthetic generator: users"},
    {"--synthetic-items", "synthetic_items", "synthetic generator: items"},
    {"--synthetic-categories", "synthetic_categories",
     "synthetic generator: categories"},
    {"--synthetic-interactions-per-user", "synthetic_interactions_per_user",
     "synthetic generator: interactions per user"},
};

struct BoolOpt {
  const char* flag;
  const char* key;
  const char* desc;
};

const std::vector<BoolOpt> kBoolFlags = {
    {"--per-user-csv", "per_user_csv", "also write per-user metric rows"},
    {"--synthetic", "synthetic", "generate a synthetic dataset in prepare"},
};

void add_common_options(CLI::App* cmd, std::string& config_path,
                        std::map<std::string, std::string>& overrides) {
  cmd->add_option("--config", config_path, "configuration file (key = value)");
  for (const auto& opt : kValueFlags) {
    cmd->add_option_function<std::string>(
        opt.flag,
        [&overrides, key = opt.key](const std::string& value) {
          overrides[key] = value;
        },
        opt.desc);
  }
  for (const auto& opt : kBoolFlags) {
    cmd->add_flag_function(
        opt.flag,
        [&overrides, key = opt.key](std::int64_t) { overrides[key] = "true"; },
        opt.desc);
  }
}

int fail_with_last_error(pup_status status) {
  std::fprintf(stderr, "error: %s\n", pup_last_error());
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Price-aware recommendation pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> overrides;
  pup_status (*runner)(const pup_config*) = nullptr;

  const std::vector<
      std::pair<const char*, std::pair<const char*, decltype(runner)>>>
      commands = {
          {"prepare",
           {"build a dataset bundle from raw CSVs or the synthetic generator",
            pup_run_prepare}},
          {"analyze-cwtp",
           {"report per-user purchase-power entropy and its histogram",
            pup_run_analyze_cwtp}},
          {"train", {"train the configured variant", pup_run_train}},
          {"evaluate",
           {"rank and score the trained model on the test split",
            pup_run_evaluate}},
          {"coldstart-eval",
           {"evaluate on unexplored-category item pools", pup_run_coldstart_eval}},
      };
  for (const auto& [name, entry] : commands) {
    auto* cmd = app.add_subcommand(name, entry.first);
    add_common_options(cmd, config_path, overrides);
    cmd->callback([&runner, fn = entry.second] { runner = fn; });
  }

  CLI11_PARSE(app, argc, argv);

  pup_config* config = nullptr;
  if (pup_status status = pup_config_new(&config); status != PUP_OK) {
    return fail_with_last_error(status);
  }
  int exit_code = 0;
  if (!config_path.empty()) {
    if (pup_status status = pup_config_load_file(config, config_path.c_str());
        status != PUP_OK) {
      exit_code = fail_with_last_error(status);
    }
  }
  if (exit_code == 0) {
    for (const auto& [key, value] : overrides) {
      if (pup_status status =
              pup_config_set(config, key.c_str(), value.c_str());
          status != PUP_OK) {
        exit_code = fail_with_last_error(status);
        break;
      }
    }
  }
  if (exit_code == 0) {
    if (pup_status status = runner(config); status != PUP_OK) {
      exit_code = fail_with_last_error(status);
    }
  }
  pup_config_free(config);
  return exit_code;
}
