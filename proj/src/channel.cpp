#include "hfcl/channel.hpp"

#include <algorithm>
#include <cmath>

#include "hfcl/error.hpp"

namespace hfcl::channel {

void ChannelConfig::validate() const {
  if (bits < 1 || bits > 32) {
    throw ConfigError("quantization bits must be in [1, 32], got " +
                      std::to_string(bits));
  }
}

std::string to_string(DatasetNoise d) {
  return d == DatasetNoise::kBlock ? "block" : "symbol";
}

DatasetNoise parse_dataset_noise(const std::string& name) {
  if (name == "block") return DatasetNoise::kBlock;
  if (name == "symbol") return DatasetNoise::kSymbol;
  throw ConfigError("unknown dataset noise reference '" + name +
                    "' (expected block, symbol)");
}

double quantization_error_bound(double scale, int bits) {
  return scale / (std::ldexp(1.0, bits) - 1.0);
}

nn::GradientVector quantize(const nn::GradientVector& g, int bits) {
  if (bits < 1 || bits > 32) {
    throw ConfigError("quantization bits must be in [1, 32], got " +
                      std::to_string(bits));
  }
  nn::GradientVector out = g;
  out.provenance = nn::Provenance::kQuantized;
  double scale = 0.0;
  for (double v : g.g) {
    if (!std::isfinite(v)) throw NumericError("cannot quantize a non-finite gradient");
    scale = std::max(scale, std::abs(v));
  }
  if (scale == 0.0) return out;

  // Level j in [0, M] sits at s * (2j - M) / M, so the end levels are exactly
  // -s and +s and re-quantizing reproduces the same scale.
  const double top = std::ldexp(1.0, bits) - 1.0;
  for (double& v : out.g) {
    const double u = std::clamp(v / scale, -1.0, 1.0);
    const double j = std::nearbyint((u + 1.0) * 0.5 * top);
    v = scale * ((2.0 * j - top) / top);
  }
  return out;
}

double noise_variance(double norm_squared, double snr_db) {
  if (norm_squared <= 0.0) return 0.0;
  return norm_squared / std::pow(10.0, snr_db / 20.0);
}

double dataset_noise_variance(double norm_squared, std::uint64_t count,
                              double snr_db, DatasetNoise reference) {
  if (reference == DatasetNoise::kBlock) {
    return noise_variance(norm_squared, snr_db);
  }
  if (count == 0 || norm_squared <= 0.0) return 0.0;
  return norm_squared / static_cast<double>(count) /
         std::pow(10.0, snr_db / 10.0);
}

nn::GradientVector transmit_gradient(const nn::GradientVector& g,
                                     const ChannelConfig& config, Rng& rng) {
  config.validate();
  nn::GradientVector out = quantize(g, config.bits);
  if (!config.noise_enabled) return out;
  out.provenance = nn::Provenance::kQuantizedNoised;
  const double var = noise_variance(g, config.snr_theta_db);
  if (var == 0.0) return out;
  std::normal_distribution<double> noise(0.0, std::sqrt(var));
  for (double& v : out.g) v += noise(rng);
  return out;
}

data::Shard transmit_dataset(const data::Shard& shard,
                             const ChannelConfig& config, Rng& rng) {
  data::Shard out = shard;
  if (!config.noise_enabled) return out;
  double norm_squared = 0.0;
  std::uint64_t count = 0;
  for (const auto& s : shard.samples) {
    for (double x : s.input) norm_squared += x * x;
    count += s.input.size();
  }
  const double var = dataset_noise_variance(
      norm_squared, count, config.snr_theta_db, config.dataset_noise);
  if (var == 0.0) return out;
  std::normal_distribution<double> noise(0.0, std::sqrt(var));
  for (auto& s : out.samples) {
    for (double& x : s.input) x += noise(rng);
  }
  return out;
}

}  // namespace hfcl::channel
