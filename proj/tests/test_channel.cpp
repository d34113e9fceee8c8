#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hfcl/channel.hpp"
#include "hfcl/error.hpp"
#include "test_util.hpp"

using namespace hfcl;
using namespace hfcl::channel;

namespace {

nn::GradientVector make_gradient(std::vector<double> g) {
  nn::GradientVector out;
  out.g = std::move(g);
  return out;
}

nn::GradientVector random_gradient(std::size_t n, double scale, Rng& rng) {
  std::normal_distribution<double> d(0.0, scale);
  nn::GradientVector out;
  out.g.resize(n);
  for (double& v : out.g) v = d(rng);
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Quantize, OneBitMapsToSignTimesScale) {
  const auto q = quantize(make_gradient({0.3, -0.7, 0.1}), 1);
  EXPECT_EQ(q.g, (std::vector<double>{0.7, -0.7, 0.7}));
  EXPECT_EQ(q.provenance, nn::Provenance::kQuantized);
}

TEST(Quantize, TwoBitLevels) {
  // Levels at -1, -1/3, 1/3, 1 for s = 1.
  const auto q = quantize(make_gradient({1.0, 0.5, 0.1, -0.2, -0.9}), 2);
  const std::vector<double> expect = {1.0, 1.0 / 3.0, 1.0 / 3.0, -1.0 / 3.0, -1.0};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    EXPECT_NEAR(q.g[i], expect[i], 1e-15);
  }
}

TEST(Quantize, ThirtyTwoBitsIsNearlyExact) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nn::GradientVector g;
  g.g.resize(1000);
  for (double& v : g.g) v = u(rng);
  const auto q = quantize(g, 32);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LT(std::abs(q.g[i] - g.g[i]), 1e-6);
}

TEST(Quantize, ErrorBoundHoldsForRandomInputs) {
  Rng rng(2);
  std::uniform_int_distribution<int> bits(1, 32);
  std::uniform_int_distribution<std::size_t> len(1, 300);
  std::uniform_real_distribution<double> log_scale(-8.0, 8.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int b = bits(rng);
    const auto g = random_gradient(len(rng), std::exp(log_scale(rng)), rng);
    const auto q = quantize(g, b);
    const double s = max_abs(g.g);
    const double bound = quantization_error_bound(s, b);
    for (std::size_t i = 0; i < g.size(); ++i) {
      // A relative slack of a few ulps covers the rounding of the level
      // arithmetic itself.
      ASSERT_LE(std::abs(q.g[i] - g.g[i]), bound * (1.0 + 1e-12) + s * 1e-15)
          << "trial " << trial << " bits " << b;
    }
  }
}

TEST(Quantize, Idempotent) {
  Rng rng(3);
  for (int b : {1, 2, 3, 5, 8, 16, 32}) {
    const auto once = quantize(random_gradient(200, 1.0, rng), b);
    const auto twice = quantize(once, b);
    EXPECT_EQ(once.g, twice.g) << "bits " << b;
  }
}

TEST(Quantize, ZeroVectorAndBadBits) {
  EXPECT_EQ(quantize(make_gradient({0.0, 0.0}), 4).g, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(quantize(make_gradient({1.0}), 0), ConfigError);
  EXPECT_THROW(quantize(make_gradient({1.0}), 33), ConfigError);
  EXPECT_THROW(quantize(make_gradient({std::nan("")}), 4), NumericError);
}

TEST(NoiseVariance, PrintedFormulaExamples) {
  EXPECT_NEAR(noise_variance(1.0, 20.0), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(noise_variance(1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(noise_variance(4.0, 40.0), 0.04);
  EXPECT_EQ(noise_variance(0.0, 20.0), 0.0);
  EXPECT_LT(noise_variance(1.0, 600.0), 1e-29);
}

TEST(NoiseVariance, DatasetReferences) {
  // 4 symbols of total energy 2: block uses the norm, symbol the mean power.
  EXPECT_NEAR(dataset_noise_variance(2.0, 4, 20.0, DatasetNoise::kBlock), 0.2, 1e-15);
  EXPECT_NEAR(dataset_noise_variance(2.0, 4, 20.0, DatasetNoise::kSymbol), 0.005, 1e-15);
  EXPECT_EQ(dataset_noise_variance(0.0, 4, 20.0, DatasetNoise::kSymbol), 0.0);
  EXPECT_EQ(parse_dataset_noise("symbol"), DatasetNoise::kSymbol);
  EXPECT_THROW(parse_dataset_noise("pixel"), ConfigError);
}

TEST(TransmitGradient, NoiseOffIsQuantizerOnly) {
  Rng rng(4);
  const auto g = random_gradient(500, 0.3, rng);
  ChannelConfig c;
  c.bits = 6;
  Rng r1(5);
  const auto out = transmit_gradient(g, c, r1);
  EXPECT_EQ(out.g, quantize(g, 6).g);
}

TEST(TransmitGradient, EmpiricalVarianceMatchesFormula) {
  Rng rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  nn::GradientVector g;
  g.g.resize(100000);
  for (double& v : g.g) v = u(rng) * 1e-3;
  for (double snr : {0.0, 10.0, 20.0}) {
    ChannelConfig c;
    c.bits = 5;
    c.snr_theta_db = snr;
    c.noise_enabled = true;
    Rng r(7);
    const auto out = transmit_gradient(g, c, r);
    EXPECT_EQ(out.provenance, nn::Provenance::kQuantizedNoised);
    const auto q = quantize(g, 5);
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double w = out.g[i] - q.g[i];
      sum += w;
      sq += w * w;
    }
    const double n = static_cast<double>(g.size());
    const double var = noise_variance(g, snr);
    EXPECT_NEAR(sq / n, var, 0.05 * var) << "snr " << snr;
    EXPECT_LT(std::abs(sum / n), 3.0 * std::sqrt(var / n)) << "snr " << snr;
  }
}

TEST(TransmitGradient, DeterministicGivenSeed) {
  Rng rng(8);
  const auto g = random_gradient(100, 1.0, rng);
  ChannelConfig c;
  c.noise_enabled = true;
  Rng a(9);
  Rng b(9);
  EXPECT_EQ(transmit_gradient(g, c, a).g, transmit_gradient(g, c, b).g);
}

TEST(TransmitDataset, NoiseOffIsIdentity) {
  data::Shard s{3, testutil::random_samples(10, 4, 4, 1)};
  ChannelConfig c;
  Rng rng(1);
  const auto out = transmit_dataset(s, c, rng);
  EXPECT_EQ(out.samples, s.samples);
  EXPECT_EQ(out.client, 3);
}

TEST(TransmitDataset, InputsNoisedLabelsKept) {
  for (DatasetNoise ref : {DatasetNoise::kBlock, DatasetNoise::kSymbol}) {
    data::Shard s{0, testutil::random_samples(400, 16, 16, 2)};
    ChannelConfig c;
    c.noise_enabled = true;
    c.snr_theta_db = 20.0;
    c.dataset_noise = ref;
    Rng rng(3);
    const auto out = transmit_dataset(s, c, rng);
    double energy = 0.0;
    double sq = 0.0;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(out.samples[i].label, s.samples[i].label);
      for (std::size_t j = 0; j < s.samples[i].input.size(); ++j) {
        const double x = s.samples[i].input[j];
        const double w = out.samples[i].input[j] - x;
        energy += x * x;
        sq += w * w;
        ++count;
      }
    }
    ASSERT_GE(count, 100000u);
    const double var = dataset_noise_variance(energy, count, 20.0, ref);
    EXPECT_NEAR(sq / static_cast<double>(count), var, 0.05 * var);
  }
}
