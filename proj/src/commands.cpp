#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "error.hpp"
#include "format.hpp"
#include "log.hpp"
#include "reports.hpp"
#include "synthetic.hpp"

namespace pup {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string out_path(const RunConfig& config, const std::string& name) {
  return (std::filesystem::path(config.out_dir) / name).string();
}

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    fail(ErrorCode::io, "cannot create output directory " + config.out_dir +
                            ": " + ec.message());
  }
}

// The prepared bundle the command reads: the configured path, or the one
// `prepare` writes into the output directory.
std::string bundle_path(const RunConfig& config) {
  return config.dataset_path.empty() ? out_path(config, "dataset.json")
                                     : config.dataset_path;
}

std::string checkpoint_path(const RunConfig& config) {
  return config.checkpoint_path.empty() ? out_path(config, "checkpoint.pup")
                                        : config.checkpoint_path;
}

void write_raw_csvs(const RawData& raw, const std::string& interactions_path,
                    const std::string& catalog_path) {
  std::string interactions = "user_id,item_id,timestamp\n";
  for (const auto& rec : raw.interactions) {
    interactions += rec.user_id;
    interactions += ',';
    interactions += rec.item_id;
    interactions += ',';
    interactions += std::to_string(rec.timestamp);
    interactions += '\n';
  }
  std::string catalog = "item_id,category_id,price\n";
  for (const auto& entry : raw.catalog) {
    catalog += entry.item_id;
    catalog += ',';
    catalog += entry.category_id;
    catalog += ',';
    catalog += format_double(entry.price);
    catalog += '\n';
  }
  for (const auto& [path, content] :
       {std::pair{interactions_path, interactions},
        std::pair{catalog_path, catalog}}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
    out << content;
    if (!out) fail(ErrorCode::io, "failed writing " + path);
  }
}

std::unique_ptr<RankingModel> load_checked_model(const RunConfig& config,
                                                 const Dataset& dataset) {
  const std::string path = checkpoint_path(config);
  auto model = load_model(path, dataset);
  if (model->variant() != config.variant) {
    fail(ErrorCode::mismatch,
         path + " holds a " + std::string(variant_name(model->variant())) +
             " model but the run is configured for " +
             std::string(variant_name(config.variant)));
  }
  return model;
}

}  // namespace

void cmd_prepare(const RunConfig& config) {
  const auto start = Clock::now();
  ensure_out_dir(config);
  std::vector<std::string> outputs;

  RawData raw;
  if (config.synthetic) {
    raw = generate_synthetic_raw(config.synthetic_spec()).raw;
    const std::string interactions = out_path(config, "interactions.csv");
    const std::string catalog = out_path(config, "catalog.csv");
    write_raw_csvs(raw, interactions, catalog);
    outputs.push_back(interactions);
    outputs.push_back(catalog);
  } else {
    if (config.interactions_path.empty() || config.catalog_path.empty()) {
      fail(ErrorCode::invalid_argument,
           "prepare needs interactions and catalog paths (or synthetic mode)");
    }
    raw = load_dataset(config.interactions_path, config.catalog_path);
  }

  const Dataset dataset = build_dataset(raw, config.levels, config.quantizer);
  const std::string bundle = out_path(config, "dataset.json");
  save_dataset(dataset, bundle);
  outputs.push_back(bundle);

  write_manifest(out_path(config, "prepare.manifest.json"), "prepare", config,
                 seconds_since(start), outputs);
}

void cmd_analyze_cwtp(const RunConfig& config) {
  const auto start = Clock::now();
  ensure_out_dir(config);
  const Dataset dataset = load_dataset_bundle(bundle_path(config));
  if (dataset.train.empty()) {
    log_warning("training split is empty: entropy report will be empty");
  }

  const std::string jsonl = out_path(config, "cwtp.jsonl");
  const std::string histogram = out_path(config, "cwtp_histogram.csv");
  write_cwtp_jsonl(jsonl, dataset);
  write_cwtp_histogram(histogram, dataset, 10);

  write_manifest(out_path(config, "analyze-cwtp.manifest.json"),
                 "analyze-cwtp", config, seconds_since(start),
                 {jsonl, histogram});
}

void cmd_train(const RunConfig& config) {
  const auto start = Clock::now();
  ensure_out_dir(config);
  const Dataset dataset = load_dataset_bundle(bundle_path(config));

  auto fit = fit_model(dataset, config.train, config.variant);

  const std::string checkpoint = checkpoint_path(config);
  const std::string loss_csv = out_path(config, "loss.csv");
  save_checkpoint(checkpoint, *fit.model, config.train);
  write_loss_history(loss_csv, fit.history);

  write_manifest(out_path(config, "train.manifest.json"), "train", config,
                 seconds_since(start), {checkpoint, loss_csv});
}

void cmd_evaluate(const RunConfig& config) {
  const auto start = Clock::now();
  ensure_out_dir(config);
  const Dataset dataset = load_dataset_bundle(bundle_path(config));
  const auto model = load_checked_model(config, dataset);

  EvalOptions options;
  options.ks = config.ks;
  options.threads = config.threads;
  const MetricsReport report = evaluate(*model, options, config.protocol);

  std::vector<std::string> outputs;
  const std::string metrics = out_path(config, "metrics.jsonl");
  write_metrics_jsonl(metrics, {report});
  outputs.push_back(metrics);

  GroupedReports grouped;
  if (config.entropy_groups_enabled()) {
    grouped =
        evaluate_by_entropy_group(*model, options, config.entropy_threshold);
    const std::string consistent = out_path(config, "metrics_consistent.jsonl");
    const std::string inconsistent =
        out_path(config, "metrics_inconsistent.jsonl");
    write_metrics_jsonl(consistent, {grouped.consistent});
    write_metrics_jsonl(inconsistent, {grouped.inconsistent});
    outputs.push_back(consistent);
    outputs.push_back(inconsistent);
  }

  if (config.per_user_csv) {
    const std::string per_user = out_path(config, "per_user.csv");
    write_per_user_csv(per_user, dataset, report,
                       config.entropy_groups_enabled() ? &grouped : nullptr);
    outputs.push_back(per_user);
  }

  write_manifest(out_path(config, "evaluate.manifest.json"), "evaluate",
                 config, seconds_since(start), outputs);
}

void cmd_coldstart_eval(const RunConfig& config) {
  const auto start = Clock::now();
  ensure_out_dir(config);
  const Dataset dataset = load_dataset_bundle(bundle_path(config));
  const auto model = load_checked_model(config, dataset);

  EvalOptions options;
  options.ks = config.ks;
  options.threads = config.threads;
  const MetricsReport cir = evaluate(*model, options, Protocol::cir);
  const MetricsReport ucir = evaluate(*model, options, Protocol::ucir);

  std::vector<std::string> outputs;
  const std::string metrics = out_path(config, "coldstart_metrics.jsonl");
  write_metrics_jsonl(metrics, {cir, ucir});
  outputs.push_back(metrics);

  if (config.per_user_csv) {
    const std::string cir_csv = out_path(config, "coldstart_per_user_cir.csv");
    const std::string ucir_csv =
        out_path(config, "coldstart_per_user_ucir.csv");
    write_per_user_csv(cir_csv, dataset, cir, nullptr);
    write_per_user_csv(ucir_csv, dataset, ucir, nullptr);
    outputs.push_back(cir_csv);
    outputs.push_back(ucir_csv);
  }

  write_manifest(out_path(config, "coldstart-eval.manifest.json"),
                 "coldstart-eval", config, seconds_since(start), outputs);
}

}  // namespace pup
