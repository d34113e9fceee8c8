#include "hfcl/data/shard.hpp"

#include <algorithm>
#include <limits>

#include "hfcl/error.hpp"
#include "hfcl/rng.hpp"

namespace hfcl::data {
namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw ConfigError("symbol count overflows 64 bits");
  }
  return a * b;
}

void check_uniform(SampleSpan samples) {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].rows != samples[0].rows ||
        samples[i].cols != samples[0].cols ||
        samples[i].input.size() != samples[0].input.size() ||
        samples[i].label.size() != samples[0].label.size()) {
      throw ShapeError("sample " + std::to_string(i) +
                       " differs in shape from sample 0");
    }
  }
}

}  // namespace

std::uint64_t symbol_count(SampleSpan samples) {
  if (samples.empty()) return 0;
  check_uniform(samples);
  return checked_mul(samples.size(), samples[0].symbols());
}

std::uint64_t input_symbol_count(SampleSpan samples) {
  if (samples.empty()) return 0;
  check_uniform(samples);
  return checked_mul(samples.size(), samples[0].input.size());
}

std::vector<Shard> partition_iid(std::vector<Sample> samples, std::size_t k,
                                 std::uint64_t seed) {
  if (k == 0) throw ConfigError("need at least one client");
  if (k > samples.size()) {
    throw ConfigError("cannot split " + std::to_string(samples.size()) +
                      " samples across " + std::to_string(k) + " clients");
  }
  Rng rng = make_rng(seed, Stream::kPartition);
  std::shuffle(samples.begin(), samples.end(), rng);
  const std::size_t base = samples.size() / k;
  std::vector<Shard> shards(k);
  auto it = samples.begin();
  for (std::size_t c = 0; c < k; ++c) {
    const auto end = (c + 1 == k) ? samples.end() : it + static_cast<long>(base);
    shards[c].client = static_cast<int>(c);
    shards[c].samples.assign(std::make_move_iterator(it),
                             std::make_move_iterator(end));
    it = end;
  }
  return shards;
}

std::vector<Sample> downsample_2x2(SampleSpan samples) {
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) {
    const std::size_t rows = s.rows / 2;
    const std::size_t cols = s.cols / 2;
    if (rows == 0 || cols == 0) throw ShapeError("image too small to pool");
    Sample d;
    d.rows = rows;
    d.cols = cols;
    d.label = s.label;
    d.input.resize(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double* top = s.input.data() + (2 * r) * s.cols + 2 * c;
        const double* bot = top + s.cols;
        d.input[r * cols + c] = 0.25 * (top[0] + top[1] + bot[0] + bot[1]);
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::pair<std::vector<Sample>, std::vector<Sample>> split_train_validation(
    SampleSpan samples, std::size_t train, std::size_t validation,
    std::uint64_t seed) {
  if (train + validation > samples.size()) {
    throw ConfigError("requested " + std::to_string(train) + " training and " +
                      std::to_string(validation) +
                      " validation samples, only " +
                      std::to_string(samples.size()) + " available");
  }
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = make_rng(seed, Stream::kSubsample);
  std::shuffle(order.begin(), order.end(), rng);
  std::pair<std::vector<Sample>, std::vector<Sample>> out;
  out.first.reserve(train);
  out.second.reserve(validation);
  for (std::size_t i = 0; i < train; ++i) out.first.push_back(samples[order[i]]);
  for (std::size_t i = 0; i < validation; ++i) {
    out.second.push_back(samples[order[train + i]]);
  }
  return out;
}

std::vector<Sample> pool(const std::vector<Shard>& shards) {
  std::vector<Sample> out;
  for (const auto& s : shards) out.insert(out.end(), s.samples.begin(), s.samples.end());
  return out;
}

}  // namespace hfcl::data
