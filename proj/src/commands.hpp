#pragma once

#include "config.hpp"

namespace pup {

// Each command loads what it needs, writes its artifacts into
// `config.out_dir`, and drops a `<command>.manifest.json` describing the
// run. Hard errors are thrown as PupError; nothing is written on failure
// paths before the error point. Input files are never modified.

// Reads the raw CSVs (or generates the synthetic dataset) and writes the
// prepared bundle `dataset.json`.
void cmd_prepare(const RunConfig& config);

// Writes per-user entropy lines `cwtp.jsonl` and the histogram
// `cwtp_histogram.csv` for the prepared dataset.
void cmd_analyze_cwtp(const RunConfig& config);

// Trains the configured variant and writes `checkpoint.pup` plus the
// per-epoch `loss.csv`.
void cmd_train(const RunConfig& config);

// Scores the checkpointed model under the configured protocol and writes
// `metrics.jsonl`, optionally per-group metrics files and a per-user CSV.
void cmd_evaluate(const RunConfig& config);

// Runs both cold-start protocols (CIR and UCIR) and writes
// `coldstart_metrics.jsonl`.
void cmd_coldstart_eval(const RunConfig& config);

}  // namespace pup
