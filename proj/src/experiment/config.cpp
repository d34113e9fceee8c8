#include "hfcl/experiment/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hfcl/error.hpp"

namespace hfcl::experiment {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + v + "'");
}

std::string format_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mode",        "clients",      "passive",     "rounds",
      "bits",        "snr-db",       "noise",       "dataset-noise", "eta",
      "minibatches", "batch-size",   "model",       "hidden",
      "loss",        "aggregation",  "images",      "labels",
      "val-images",  "val-labels",   "downsample",  "train-samples",
      "val-samples", "seed",         "out",         "bandwidth-hz",
      "link-snr-db"};
  return keys;
}

std::string canonical_key(const std::string& name) {
  if (name == "L") return "passive";
  if (name == "B") return "bits";
  if (name == "K") return "clients";
  if (name == "T") return "rounds";
  if (name == "snr_db" || name == "SNR" || name == "snr") return "snr-db";
  for (const auto& k : config_keys()) {
    if (k == name) return k;
  }
  throw ConfigError("unknown configuration key '" + name + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "mode") mode = federation::parse_mode(v);
  else if (key == "clients") clients = parse_integer<std::size_t>(key, v);
  else if (key == "passive") passive = parse_integer<std::size_t>(key, v);
  else if (key == "rounds") rounds = parse_integer<std::size_t>(key, v);
  else if (key == "bits") bits = parse_integer<int>(key, v);
  else if (key == "snr-db") snr_db = parse_double(key, v);
  else if (key == "noise") noise = parse_bool(key, v);
  else if (key == "dataset-noise") dataset_noise = v;
  else if (key == "eta") eta = parse_double(key, v);
  else if (key == "minibatches") minibatches = parse_integer<std::size_t>(key, v);
  else if (key == "batch-size") batch_size = parse_integer<std::size_t>(key, v);
  else if (key == "model") model = v;
  else if (key == "hidden") hidden = parse_integer<std::size_t>(key, v);
  else if (key == "loss") loss = v;
  else if (key == "aggregation") aggregation = v;
  else if (key == "images") images = v;
  else if (key == "labels") labels = v;
  else if (key == "val-images") val_images = v;
  else if (key == "val-labels") val_labels = v;
  else if (key == "downsample") downsample = parse_bool(key, v);
  else if (key == "train-samples") train_samples = parse_integer<std::size_t>(key, v);
  else if (key == "val-samples") val_samples = parse_integer<std::size_t>(key, v);
  else if (key == "seed") seed = parse_integer<std::uint64_t>(key, v);
  else if (key == "out") out = v;
  else if (key == "bandwidth-hz") bandwidth_hz = parse_double(key, v);
  else if (key == "link-snr-db") link_snr_db = parse_double(key, v);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  if (key == "mode") return federation::to_string(mode);
  if (key == "clients") return std::to_string(clients);
  if (key == "passive") return std::to_string(passive);
  if (key == "rounds") return std::to_string(rounds);
  if (key == "bits") return std::to_string(bits);
  if (key == "snr-db") return format_double(snr_db);
  if (key == "noise") return noise ? "true" : "false";
  if (key == "dataset-noise") return dataset_noise;
  if (key == "eta") return format_double(eta);
  if (key == "minibatches") return std::to_string(minibatches);
  if (key == "batch-size") return std::to_string(batch_size);
  if (key == "model") return model;
  if (key == "hidden") return std::to_string(hidden);
  if (key == "loss") return loss;
  if (key == "aggregation") return aggregation;
  if (key == "images") return images;
  if (key == "labels") return labels;
  if (key == "val-images") return val_images;
  if (key == "val-labels") return val_labels;
  if (key == "downsample") return downsample ? "true" : "false";
  if (key == "train-samples") return std::to_string(train_samples);
  if (key == "val-samples") return std::to_string(val_samples);
  if (key == "seed") return std::to_string(seed);
  if (key == "out") return out;
  if (key == "bandwidth-hz") return format_double(bandwidth_hz);
  if (key == "link-snr-db") return format_double(link_snr_db);
  throw ConfigError("unknown configuration key '" + key + "'");
}

void ExperimentConfig::validate() const {
  using federation::Mode;
  if (clients < 1) throw ConfigError("clients must be at least 1");
  if (passive > clients) {
    throw ConfigError("passive (" + std::to_string(passive) +
                      ") exceeds clients (" + std::to_string(clients) + ")");
  }
  if (mode == Mode::kFl && passive != 0) {
    throw ConfigError("mode fl requires passive = 0");
  }
  if (mode == Mode::kFlActiveOnly && passive >= clients) {
    throw ConfigError(
        "mode fl-active-only requires passive < clients: with every client "
        "passive there is no data to train on");
  }
  if (model != "desk-mlp" && model != "paper-cnn-count") {
    throw ConfigError("unknown model '" + model +
                      "' (expected desk-mlp, paper-cnn-count)");
  }
  if (loss != "xent" && loss != "mse") {
    throw ConfigError("unknown loss '" + loss + "' (expected xent, mse)");
  }
  federation::parse_aggregation(aggregation);
  channel::parse_dataset_noise(dataset_noise);
  if (bits < 1 || bits > 32) throw ConfigError("bits must be in [1, 32]");
  if (!(eta > 0.0)) throw ConfigError("eta must be positive");
  if (rounds < 1) throw ConfigError("rounds must be at least 1");
  if (minibatches < 1) throw ConfigError("minibatches must be at least 1");
  if (train_samples < clients) {
    throw ConfigError("train-samples must be at least the client count");
  }
  if (val_images.empty() != val_labels.empty()) {
    throw ConfigError("val-images and val-labels must be given together");
  }
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& k : config_keys()) out += k + " = " + get(k) + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

federation::RunConfig ExperimentConfig::run_config() const {
  federation::RunConfig rc;
  rc.training.eta = eta;
  rc.training.minibatches = minibatches;
  rc.training.batch_size = batch_size;
  rc.training.rounds = rounds;
  rc.training.seed = seed;
  rc.training.loss = loss == "mse" ? nn::Loss::kMse : nn::Loss::kCrossEntropy;
  rc.channel.bits = bits;
  rc.channel.snr_theta_db = snr_db;
  rc.channel.noise_enabled = noise;
  rc.channel.dataset_noise = channel::parse_dataset_noise(dataset_noise);
  rc.aggregation = federation::parse_aggregation(aggregation);
  rc.links.total_bandwidth_hz = bandwidth_hz;
  rc.links.snr_db = link_snr_db;
  return rc;
}

}  // namespace hfcl::experiment
