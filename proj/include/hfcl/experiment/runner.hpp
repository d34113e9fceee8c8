#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfcl/data/sample.hpp"
#include "hfcl/experiment/config.hpp"
#include "hfcl/federation.hpp"

namespace hfcl::experiment {

inline constexpr const char* kMetricsHeader =
    "round,train_loss,val_acc_pct,cum_symbols,cum_blocks,max_delay_s";

// Samples as read from disk, before subsampling and pooling.
struct RawData {
  std::vector<data::Sample> train;
  // Empty unless separate validation files were configured.
  std::vector<data::Sample> validation;
};

RawData load_raw(const ExperimentConfig& config);

// Training roster (IID shards, first `passive` clients passive) and the
// validation set for one configuration.
struct PreparedData {
  federation::Roster roster;
  std::vector<data::Sample> validation;
};

PreparedData prepare(const ExperimentConfig& config, const RawData& raw);

struct ExperimentResult {
  federation::RunResult run;
  std::uint64_t formula_symbols = 0;
  // Metrics CSV: header, one row per round, then a `# {json}` footer line.
  std::string body;
  std::string footer;

  std::string metrics() const { return body + footer; }
  double final_accuracy() const;
};

// FNV-1a over the bytes of theta, used to compare final models in files.
std::uint64_t theta_hash(const std::vector<double>& theta);

// Runs the configured mode and builds the metrics text. Writes it to
// config.out when set (via a temporary file and rename). Throws Error if the
// ledger total differs from the closed-form overhead.
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RawData& raw);

// Writes `text` to `path` atomically.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace hfcl::experiment
