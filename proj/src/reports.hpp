#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "evaluation.hpp"
#include "training.hpp"

namespace pup {

inline constexpr const char* kVersion = "0.1.0";

// CSV `epoch,mean_loss,learning_rate`, epochs numbered from 1.
void write_loss_history(const std::string& path,
                        const std::vector<EpochRecord>& history);

// One JSON object per (protocol, K):
// {"protocol": ..., "K": ..., "recall": ..., "ndcg": ..., "users_evaluated": ...}
// Reports are appended in the order given.
void write_metrics_jsonl(const std::string& path,
                         const std::vector<MetricsReport>& reports);

// CSV `user_id,K,recall,ndcg,entropy_group`. The group column is derived
// from `grouped` when given, else left empty.
void write_per_user_csv(const std::string& path, const Dataset& dataset,
                        const MetricsReport& report,
                        const GroupedReports* grouped);

// Per-user entropy JSON lines:
// {"user": "<id>", "entropy": <real>, "num_categories": <int>}
// Users without training history are omitted.
void write_cwtp_jsonl(const std::string& path, const Dataset& dataset);

// Histogram CSV `bin_lo,bin_hi,count` over the per-user entropies with
// equal-width bins; a single bin when all entropies coincide.
void write_cwtp_histogram(const std::string& path, const Dataset& dataset,
                          int bins);

// JSON manifest describing one command run: command name, version, resolved
// config echo, seed, wall-clock duration, and emitted artifact paths.
void write_manifest(const std::string& path, const std::string& command,
                    const RunConfig& config, double duration_seconds,
                    const std::vector<std::string>& outputs);

}  // namespace pup
