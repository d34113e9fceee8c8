#pragma once

// Uplink model: B-bit quantization of gradients followed by additive white
// Gaussian noise whose variance is tied to the signal norm through
//   SNR_dB = 20 log10(||g||^2 / sigma^2),
// i.e. sigma^2 = ||g||^2 / 10^(SNR_dB / 20). The same rule corrupts the input
// symbols of datasets uploaded by passive clients. The downlink is ideal.

#include <cstdint>
#include <span>
#include <string>

#include "hfcl/data/shard.hpp"
#include "hfcl/nn/model.hpp"
#include "hfcl/rng.hpp"

namespace hfcl::channel {

// How the dataset-noise variance is referenced to the transmitted symbols.
// kBlock applies the gradient rule to the norm of the whole block of input
// symbols. kSymbol uses the conventional per-symbol power ratio,
// sigma^2 = mean(x^2) / 10^(SNR_dB / 10).
enum class DatasetNoise { kBlock, kSymbol };

std::string to_string(DatasetNoise d);
// Accepts "block" or "symbol"; throws ConfigError otherwise.
DatasetNoise parse_dataset_noise(const std::string& name);

struct ChannelConfig {
  int bits = 32;
  double snr_theta_db = 20.0;
  bool noise_enabled = false;
  DatasetNoise dataset_noise = DatasetNoise::kBlock;

  // Throws ConfigError unless 1 <= bits <= 32.
  void validate() const;
};

// Uniform symmetric nearest-level quantizer: 2^bits levels spanning [-s, s]
// with s = max|g_i|, returned dequantized. An all-zero vector is returned
// unchanged. Idempotent for fixed `bits`.
nn::GradientVector quantize(const nn::GradientVector& g, int bits);

// Largest possible |Q_B(g)_i - g_i|: half the level spacing, s / (2^bits - 1).
double quantization_error_bound(double scale, int bits);

// Per-coordinate noise variance for a signal of squared norm `norm_squared`.
double noise_variance(double norm_squared, double snr_db);
// Dataset-noise variance for `count` symbols of total energy `norm_squared`.
double dataset_noise_variance(double norm_squared, std::uint64_t count,
                              double snr_db, DatasetNoise reference);
inline double noise_variance(const nn::GradientVector& g, double snr_db) {
  return noise_variance(g.norm_squared(), snr_db);
}

// Q_B(g) + w with w ~ N(0, sigma^2 I), sigma^2 from the unquantized g. With
// noise disabled only the quantizer is applied.
nn::GradientVector transmit_gradient(const nn::GradientVector& g,
                                     const ChannelConfig& config, Rng& rng);

// Copy of the shard whose input symbols carry N(0, sigma^2) noise, sigma^2
// from all input symbols of this transmission as selected by
// config.dataset_noise. Labels are left intact. Identity when noise is
// disabled.
data::Shard transmit_dataset(const data::Shard& shard,
                             const ChannelConfig& config, Rng& rng);

}  // namespace hfcl::channel
