#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfcl/experiment/config.hpp"
#include "hfcl/experiment/runner.hpp"

namespace hfcl::experiment {

struct SweepSpec {
  // L, B, snr_db or any configuration key.
  std::string variable;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
};

// Parses "VAR=v1,v2,..." and "s1,s2,...". Throws ConfigError.
SweepSpec parse_sweep(const std::string& assignment, const std::string& seeds);

struct SweepRow {
  std::string value;
  // Final validation accuracy per seed, in seed order.
  std::vector<double> accuracies;
  double mean = 0.0;
  // Sample standard deviation; 0 for a single seed.
  double stddev = 0.0;
};

struct SweepTable {
  std::string key;
  std::vector<SweepRow> rows;

  std::string to_csv() const;
};

// Runs every (value, seed) cell of the cross product. Cells are independent
// and run in parallel. When `cell_dir` is non-empty each cell's metrics are
// written there atomically as <key>=<value>_seed=<seed>.csv.
SweepTable sweep(const ExperimentConfig& base, const SweepSpec& spec,
                 const RawData& raw, const std::string& cell_dir = "");

}  // namespace hfcl::experiment
