#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hfcl/federation.hpp"

namespace hfcl::experiment {

// Every field has a key of the same name as its command-line flag (without
// the leading dashes). Config files hold one `key = value` per line; `#`
// starts a comment; unknown keys are errors.
struct ExperimentConfig {
  federation::Mode mode = federation::Mode::kHfcl;
  std::size_t clients = 10;
  std::size_t passive = 0;
  std::size_t rounds = 50;
  int bits = 5;
  double snr_db = 20.0;
  bool noise = true;
  // "block" or "symbol", see channel::DatasetNoise.
  std::string dataset_noise = "block";
  double eta = 2.0;
  std::size_t minibatches = 1;
  std::size_t batch_size = 0;
  std::string model = "desk-mlp";
  std::size_t hidden = 32;
  std::string loss = "xent";
  std::string aggregation = "literal";
  std::string images;
  std::string labels;
  // Optional separate validation files; otherwise validation samples are
  // drawn from `images`/`labels`, disjoint from the training samples.
  std::string val_images;
  std::string val_labels;
  bool downsample = true;
  std::size_t train_samples = 1000;
  std::size_t val_samples = 500;
  std::uint64_t seed = 0;
  std::string out;
  double bandwidth_hz = 1e6;
  double link_snr_db = 20.0;

  // Assigns one key from its text form. Throws ConfigError for unknown keys
  // or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  // Mode/roster consistency: fl needs passive = 0, fl-active-only needs
  // passive < clients, passive <= clients, known model/loss/aggregation.
  void validate() const;

  std::string to_text() const;
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  federation::RunConfig run_config() const;

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

// All keys in serialization order.
const std::vector<std::string>& config_keys();

// Maps sweep variable names (L, B, snr_db, or any config key) to a key.
std::string canonical_key(const std::string& name);

}  // namespace hfcl::experiment
