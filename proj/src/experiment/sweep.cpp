#include "hfcl/experiment/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>

#include "hfcl/error.hpp"

namespace hfcl::experiment {
namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

SweepSpec parse_sweep(const std::string& assignment, const std::string& seeds) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("sweep must look like VAR=v1,v2,... (got '" + assignment + "')");
  }
  SweepSpec spec;
  spec.variable = assignment.substr(0, eq);
  spec.values = split_csv(assignment.substr(eq + 1));
  if (spec.values.empty()) throw ConfigError("sweep has no values");
  for (const auto& s : split_csv(seeds)) {
    try {
      std::size_t used = 0;
      spec.seeds.push_back(std::stoull(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("invalid seed '" + s + "'");
    }
  }
  return spec;
}

std::string SweepTable::to_csv() const {
  std::string out = "variable,value,mean_val_acc_pct,std_val_acc_pct,seeds,val_acc_pct_per_seed\n";
  char buf[64];
  for (const auto& r : rows) {
    out += key + "," + r.value + ",";
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%zu,", r.mean, r.stddev,
                  r.accuracies.size());
    out += buf;
    for (std::size_t i = 0; i < r.accuracies.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.6f", i ? ";" : "", r.accuracies[i]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

SweepTable sweep(const ExperimentConfig& base, const SweepSpec& spec,
                 const RawData& raw, const std::string& cell_dir) {
  if (spec.values.empty()) throw ConfigError("sweep has no values");
  std::vector<std::uint64_t> seeds = spec.seeds;
  if (seeds.empty()) seeds.push_back(base.seed);

  SweepTable table;
  table.key = canonical_key(spec.variable);

  // Build and validate every cell before running any of them.
  std::vector<ExperimentConfig> cells;
  for (const auto& v : spec.values) {
    for (std::uint64_t s : seeds) {
      ExperimentConfig c = base;
      c.set(table.key, v);
      c.seed = s;
      c.out.clear();
      c.validate();
      cells.push_back(std::move(c));
    }
  }

  std::vector<double> acc(cells.size(), 0.0);
  std::exception_ptr failure;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(cells.size()); ++i) {
    try {
      const ExperimentResult r = run_experiment(cells[i], raw);
      acc[i] = r.final_accuracy();
      if (!cell_dir.empty()) {
        const std::string name = table.key + "=" + cells[i].get(table.key) +
                                 "_seed=" + std::to_string(cells[i].seed) + ".csv";
        write_file_atomic((std::filesystem::path(cell_dir) / name).string(),
                          r.metrics());
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    SweepRow row;
    row.value = spec.values[vi];
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      row.accuracies.push_back(acc[vi * seeds.size() + si]);
    }
    double sum = 0.0;
    for (double a : row.accuracies) sum += a;
    row.mean = sum / static_cast<double>(row.accuracies.size());
    if (row.accuracies.size() > 1) {
      double ss = 0.0;
      for (double a : row.accuracies) ss += (a - row.mean) * (a - row.mean);
      row.stddev = std::sqrt(ss / static_cast<double>(row.accuracies.size() - 1));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hfcl::experiment
