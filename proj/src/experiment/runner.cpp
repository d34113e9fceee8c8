#include "hfcl/experiment/runner.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "hfcl/comms.hpp"
#include "hfcl/data/idx.hpp"
#include "hfcl/data/shard.hpp"
#include "hfcl/error.hpp"

namespace hfcl::experiment {
namespace {

std::shared_ptr<const nn::ModelSpec> build_model(const ExperimentConfig& config,
                                                 std::size_t inputs) {
  if (config.model == "paper-cnn-count") {
    return std::make_shared<const nn::ModelSpec>(nn::ModelSpec::paper_cnn_count());
  }
  return std::make_shared<const nn::ModelSpec>(
      nn::ModelSpec::desk_mlp(inputs, config.hidden, data::kMnistClasses));
}

}  // namespace

RawData load_raw(const ExperimentConfig& config) {
  if (config.images.empty() || config.labels.empty()) {
    throw ConfigError("images and labels paths are required");
  }
  RawData raw;
  raw.train = data::load_idx(config.images, config.labels);
  if (!config.val_images.empty()) {
    raw.validation = data::load_idx(config.val_images, config.val_labels);
  }
  return raw;
}

PreparedData prepare(const ExperimentConfig& config, const RawData& raw) {
  config.validate();
  std::vector<data::Sample> train;
  std::vector<data::Sample> validation;
  if (raw.validation.empty()) {
    std::tie(train, validation) = data::split_train_validation(
        raw.train, config.train_samples, config.val_samples, config.seed);
  } else {
    train = data::split_train_validation(raw.train, config.train_samples, 0,
                                         config.seed)
                .first;
    const std::size_t n_val =
        config.val_samples == 0 ? raw.validation.size() : config.val_samples;
    validation = data::split_train_validation(raw.validation, 0, n_val,
                                              config.seed)
                     .second;
  }
  if (config.downsample) {
    train = data::downsample_2x2(train);
    validation = data::downsample_2x2(validation);
  }
  PreparedData out;
  out.roster.shards = data::partition_iid(std::move(train), config.clients,
                                          config.seed);
  out.roster.passive = config.passive;
  out.validation = std::move(validation);
  return out;
}

double ExperimentResult::final_accuracy() const {
  return run.ledger.empty() ? std::nan("") : run.ledger.back().val_accuracy;
}

std::uint64_t theta_hash(const std::vector<double>& theta) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : theta) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_raw(config));
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RawData& raw) {
  PreparedData prepared = prepare(config, raw);
  const auto& roster = prepared.roster;
  const auto spec =
      build_model(config, roster.shards.front().samples.front().input_size());
  if (!spec->trainable()) {
    throw ConfigError(
        "model paper-cnn-count only counts parameters; train with desk-mlp or "
        "use the overhead subcommand");
  }

  ExperimentResult result;
  result.run = federation::run(config.mode, roster, spec, config.run_config(),
                               prepared.validation);
  const std::size_t p = spec->param_count();
  result.formula_symbols =
      federation::expected_overhead(config.mode, roster, config.rounds, p);
  if (result.formula_symbols != result.run.total_symbols()) {
    throw Error("ledger total " + std::to_string(result.run.total_symbols()) +
                " differs from the closed-form overhead " +
                std::to_string(result.formula_symbols));
  }

  std::string body = std::string(kMetricsHeader) + "\n";
  char line[256];
  for (const auto& r : result.run.ledger) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.6f,%llu,%llu,%.9g\n", r.round,
                  r.train_loss, r.val_accuracy,
                  static_cast<unsigned long long>(r.cumulative_symbols),
                  static_cast<unsigned long long>(
                      comms::to_blocks(r.cumulative_symbols)),
                  r.max_delay_s);
    body += line;
  }

  std::uint64_t dataset = 0;
  std::uint64_t inputs = 0;
  std::vector<std::uint64_t> passive_symbols;
  for (std::size_t k = 0; k < roster.clients(); ++k) {
    const std::uint64_t d = data::symbol_count(roster.shards[k]);
    dataset += d;
    inputs += data::input_symbol_count(roster.shards[k].samples);
    if (roster.is_passive(k)) passive_symbols.push_back(d);
  }
  const comms::OverheadReport report = comms::make_report(
      dataset, config.rounds, p, roster.clients(), passive_symbols);

  nlohmann::ordered_json footer = {
      {"mode", federation::to_string(config.mode)},
      {"clients", roster.clients()},
      {"passive", roster.passive},
      {"rounds", config.rounds},
      {"params", p},
      {"dataset_symbols", dataset},
      {"dataset_input_symbols", inputs},
      {"T_CL", report.cl},
      {"T_FL", report.fl},
      {"T_HFCL", report.hfcl},
      {"formula_symbols", result.formula_symbols},
      {"ledger_symbols", result.run.total_symbols()},
      {"formula_blocks", comms::to_blocks(result.formula_symbols)},
      {"ledger_blocks", comms::to_blocks(result.run.total_symbols())},
      {"final_val_acc_pct", result.final_accuracy()},
      {"theta_fnv1a64", theta_hash(result.run.params.theta)},
  };
  result.body = std::move(body);
  result.footer = "# " + footer.dump() + "\n";

  if (!config.out.empty()) write_file_atomic(config.out, result.metrics());
  return result;
}

void write_file_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path);
}

}  // namespace hfcl::experiment
