#include "reports.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "error.hpp"
#include "format.hpp"

namespace pup {

namespace {

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot open " + path + " for writing");
  out << content;
  if (!out) fail(ErrorCode::io, "failed writing " + path);
}

// Entropies of every user with training history, in user-index order.
std::vector<double> user_entropies(const Dataset& dataset) {
  std::vector<double> entropies;
  for (const auto& profile : compute_all_cwtp(dataset)) {
    if (!profile.empty()) entropies.push_back(cwtp_entropy(profile));
  }
  return entropies;
}

}  // namespace

void write_loss_history(const std::string& path,
                        const std::vector<EpochRecord>& history) {
  std::string out = "epoch,mean_loss,learning_rate\n";
  for (const auto& record : history) {
    out += std::to_string(record.epoch);
    out += ',';
    out += format_double(record.mean_loss);
    out += ',';
    out += format_double(record.learning_rate);
    out += '\n';
  }
  write_text(path, out);
}

void write_metrics_jsonl(const std::string& path,
                         const std::vector<MetricsReport>& reports) {
  std::string out;
  for (const auto& report : reports) {
    for (std::size_t ki = 0; ki < report.ks.size(); ++ki) {
      nlohmann::ordered_json line;
      line["protocol"] = std::string(protocol_name(report.protocol));
      line["K"] = report.ks[ki];
      line["recall"] = report.recall[ki];
      line["ndcg"] = report.ndcg[ki];
      line["users_evaluated"] = report.users_evaluated;
      out += line.dump();
      out += '\n';
    }
  }
  write_text(path, out);
}

void write_per_user_csv(const std::string& path, const Dataset& dataset,
                        const MetricsReport& report,
                        const GroupedReports* grouped) {
  std::string out = "user_id,K,recall,ndcg,entropy_group\n";
  for (const auto& row : report.per_user) {
    std::string group;
    if (grouped) {
      const double h = grouped->user_entropy[row.user];
      if (!std::isnan(h)) {
        group = h <= grouped->threshold ? "consistent" : "inconsistent";
      }
    }
    for (const auto& km : row.per_k) {
      out += dataset.user_ids[row.user];
      out += ',';
      out += std::to_string(km.k);
      out += ',';
      out += format_double(km.recall);
      out += ',';
      out += format_double(km.ndcg);
      out += ',';
      out += group;
      out += '\n';
    }
  }
  write_text(path, out);
}

void write_cwtp_jsonl(const std::string& path, const Dataset& dataset) {
  const auto profiles = compute_all_cwtp(dataset);
  std::string out;
  for (int u = 0; u < dataset.user_count(); ++u) {
    if (profiles[u].empty()) continue;
    nlohmann::ordered_json line;
    line["user"] = dataset.user_ids[u];
    line["entropy"] = cwtp_entropy(profiles[u]);
    line["num_categories"] = static_cast<int>(profiles[u].size());
    out += line.dump();
    out += '\n';
  }
  write_text(path, out);
}

void write_cwtp_histogram(const std::string& path, const Dataset& dataset,
                          int bins) {
  if (bins < 1) fail(ErrorCode::invalid_argument, "bins must be at least 1");
  const auto entropies = user_entropies(dataset);
  std::string out = "bin_lo,bin_hi,count\n";
  if (!entropies.empty()) {
    const double max_h = *std::max_element(entropies.begin(), entropies.end());
    if (max_h == 0.0) {
      out += "0,0," + std::to_string(entropies.size()) + "\n";
    } else {
      const double width = max_h / bins;
      std::vector<std::size_t> counts(bins, 0);
      for (double h : entropies) {
        int bin = static_cast<int>(h / width);
        if (bin >= bins) bin = bins - 1;  // max lands in the last bin
        ++counts[bin];
      }
      for (int b = 0; b < bins; ++b) {
        out += format_double(b * width);
        out += ',';
        out += format_double(b + 1 == bins ? max_h : (b + 1) * width);
        out += ',';
        out += std::to_string(counts[b]);
        out += '\n';
      }
    }
  }
  write_text(path, out);
}

void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config, double duration_seconds,
                    const std::vector<std::string>& outputs) {
  nlohmann::ordered_json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = config.train.seed;
  manifest["duration_seconds"] = duration_seconds;
  auto& echo = manifest["config"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config_echo(config)) echo[key] = value;
  manifest["outputs"] = outputs;
  write_text(path, manifest.dump(2) + "\n");
}

}  // namespace pup
