// hfcl_sim: run one training protocol, a parameter sweep, or the overhead
// table.
//
//   hfcl_sim --mode hfcl --passive 5 --images I --labels L --out m.csv
//   hfcl_sim --mode hfcl --sweep L=0,1,3,5 --seeds 0,1,2 --images I --labels L
//   hfcl_sim overhead --model paper-cnn-count --clients 10 --rounds 98
//   hfcl_sim fixture --images img.idx --labels lab.idx --count 4

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hfcl/comms.hpp"
#include "hfcl/data/idx.hpp"
#include "hfcl/error.hpp"
#include "hfcl/experiment/config.hpp"
#include "hfcl/experiment/runner.hpp"
#include "hfcl/experiment/sweep.hpp"
#include "hfcl/nn/model.hpp"

namespace {

using hfcl::experiment::ExperimentConfig;

const std::map<std::string, std::string> kHelp = {
    {"mode", "cl, fl, fl-active-only, hfcl or hfcl-sdt"},
    {"clients", "number of clients K"},
    {"passive", "passive clients L (ids 0..L-1)"},
    {"rounds", "communication rounds T"},
    {"bits", "gradient quantization bits B, 1..32"},
    {"snr-db", "uplink SNR in dB for gradient and dataset noise"},
    {"dataset-noise", "dataset noise reference: block or symbol"},
    {"eta", "learning rate"},
    {"minibatches", "mini-batches per local gradient"},
    {"batch-size", "mini-batch size; overrides --minibatches when set"},
    {"model", "desk-mlp, or paper-cnn-count (parameter count only)"},
    {"hidden", "hidden units of the desk MLP"},
    {"loss", "xent or mse"},
    {"aggregation", "literal (sum of group means) or weighted"},
    {"images", "IDX image file, optionally gzipped"},
    {"labels", "IDX label file, optionally gzipped"},
    {"val-images", "separate validation images"},
    {"val-labels", "separate validation labels"},
    {"train-samples", "training samples drawn from --images"},
    {"val-samples", "validation samples"},
    {"seed", "seed for every random stream"},
    {"out", "metrics CSV path (sweep: table path)"},
    {"bandwidth-hz", "total uplink bandwidth for the delay model"},
    {"link-snr-db", "link SNR for the delay model"},
};

int run_overhead(const std::string& model, std::uint64_t params,
                 std::uint64_t clients, std::uint64_t rounds,
                 std::uint64_t dataset_symbols, const std::string& passive_list) {
  if (params == 0) {
    params = model == "paper-cnn-count"
                 ? hfcl::nn::ModelSpec::paper_cnn_count().param_count()
                 : hfcl::nn::ModelSpec::desk_mlp().param_count();
  }
  if (clients == 0 || dataset_symbols % clients != 0) {
    throw hfcl::ConfigError("dataset symbols must split evenly across clients");
  }
  const std::uint64_t per_shard = dataset_symbols / clients;
  std::printf("P=%llu K=%llu T=%llu D=%llu symbols\n",
              static_cast<unsigned long long>(params),
              static_cast<unsigned long long>(clients),
              static_cast<unsigned long long>(rounds),
              static_cast<unsigned long long>(dataset_symbols));
  std::printf("scheme,L,symbols,blocks\n");
  const auto cl = hfcl::comms::overhead_cl(dataset_symbols);
  const auto fl = hfcl::comms::overhead_fl(rounds, params, clients);
  std::printf("cl,-,%llu,%llu\n", static_cast<unsigned long long>(cl),
              static_cast<unsigned long long>(hfcl::comms::to_blocks(cl)));
  std::printf("fl,-,%llu,%llu\n", static_cast<unsigned long long>(fl),
              static_cast<unsigned long long>(hfcl::comms::to_blocks(fl)));
  std::stringstream ss(passive_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::uint64_t l = std::stoull(item);
    const auto h = hfcl::comms::overhead_hfcl(rounds, params, clients, l, per_shard);
    std::printf("hfcl,%llu,%llu,%llu\n", static_cast<unsigned long long>(l),
                static_cast<unsigned long long>(h),
                static_cast<unsigned long long>(hfcl::comms::to_blocks(h)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid federated/centralized learning simulator"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  // Every configuration key is also a flag; flags override the file.
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> options;
  const std::map<std::string, std::string> aliases = {
      {"clients", "--clients,-K"}, {"passive", "--passive,-L"},
      {"rounds", "--rounds,-T"},   {"bits", "--bits,-B"}};
  for (const auto& key : hfcl::experiment::config_keys()) {
    if (key == "downsample" || key == "noise") continue;
    const auto it = aliases.find(key);
    const std::string name = it != aliases.end() ? it->second : "--" + key;
    const auto help = kHelp.find(key);
    options[key] = app.add_option(name, overrides[key],
                                  help != kHelp.end() ? help->second : "");
  }
  bool downsample = true;
  bool noise = true;
  auto* downsample_opt =
      app.add_flag("--downsample,!--no-downsample", downsample,
                   "2x2 average-pool images to 14x14");
  auto* noise_opt = app.add_flag("--noise,!--no-noise", noise,
                                 "Gaussian noise on the uplink");
  std::string sweep_arg;
  std::string seeds_arg;
  app.add_option("--sweep", sweep_arg, "VAR=v1,v2,... with VAR in L, B, snr_db");
  app.add_option("--seeds", seeds_arg, "s1,s2,... seeds per sweep value");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  auto* overhead = app.add_subcommand("overhead", "closed-form overhead table");
  std::string oh_model = "paper-cnn-count";
  std::uint64_t oh_params = 0, oh_clients = 10, oh_rounds = 98;
  std::uint64_t oh_dataset = 28ULL * 28ULL * 60000ULL;
  std::string oh_passive = "0,1,3,5,7,10";
  overhead->add_option("--model", oh_model, "desk-mlp or paper-cnn-count");
  overhead->add_option("--params,-P", oh_params, "overrides the model's P");
  overhead->add_option("--clients,-K", oh_clients, "number of clients K");
  overhead->add_option("--rounds,-T", oh_rounds, "communication rounds T");
  overhead->add_option("--dataset-symbols", oh_dataset, "total dataset symbols D");
  overhead->add_option("--passive-list", oh_passive, "comma-separated L values");

  auto* fixture = app.add_subcommand("fixture", "write a small synthetic IDX pair");
  std::string fx_images, fx_labels;
  std::uint32_t fx_count = 4, fx_rows = 2, fx_cols = 2;
  fixture->add_option("--images", fx_images, "output IDX image file")->required();
  fixture->add_option("--labels", fx_labels, "output IDX label file")->required();
  fixture->add_option("--count", fx_count, "number of samples");
  fixture->add_option("--rows", fx_rows, "image rows");
  fixture->add_option("--cols", fx_cols, "image columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (overhead->parsed()) {
      return run_overhead(oh_model, oh_params, oh_clients, oh_rounds, oh_dataset,
                          oh_passive);
    }
    if (fixture->parsed()) {
      hfcl::data::write_idx_fixture(fx_images, fx_labels, fx_count, fx_rows,
                                    fx_cols);
      return 0;
    }

    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg.set(key, overrides[key]);
    }
    if (downsample_opt->count() > 0) cfg.downsample = downsample;
    if (noise_opt->count() > 0) cfg.noise = noise;
    cfg.validate();
    if (print_config) {
      std::cout << cfg.to_text();
      return 0;
    }

    if (!sweep_arg.empty()) {
      const auto spec = hfcl::experiment::parse_sweep(sweep_arg, seeds_arg);
      const auto raw = hfcl::experiment::load_raw(cfg);
      const std::string cells = cfg.out.empty() ? "" : cfg.out + ".cells";
      const auto table = hfcl::experiment::sweep(cfg, spec, raw, cells);
      const std::string csv = table.to_csv();
      if (!cfg.out.empty()) hfcl::experiment::write_file_atomic(cfg.out, csv);
      std::cout << csv;
      return 0;
    }

    const auto result = hfcl::experiment::run_experiment(cfg);
    if (cfg.out.empty()) std::cout << result.metrics();
    else std::cerr << result.footer;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
