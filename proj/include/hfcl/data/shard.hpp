#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hfcl/data/sample.hpp"

namespace hfcl::data {

// One client's local dataset. Client ids are 0-based; in a roster the first
// L ids are the passive clients.
struct Shard {
  int client = 0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// d_k = D_k * (U_x V_x + U_y V_y), exact. Throws ShapeError for mixed
// sample shapes and ConfigError on overflow.
std::uint64_t symbol_count(SampleSpan samples);
inline std::uint64_t symbol_count(const Shard& s) { return symbol_count(s.samples); }

// Input symbols only, D_k * U_x V_x.
std::uint64_t input_symbol_count(SampleSpan samples);

// Seeded shuffle, then K contiguous equal pieces; the last shard takes the
// remainder. Throws ConfigError if K == 0 or K > samples.size().
std::vector<Shard> partition_iid(std::vector<Sample> samples, std::size_t k,
                                 std::uint64_t seed);

// 2x2 average pooling of every image (odd trailing rows/cols are dropped).
std::vector<Sample> downsample_2x2(SampleSpan samples);

// Seeded disjoint subsample: first `train` then `validation` samples of a
// shuffled copy. Throws ConfigError if the request exceeds the input.
std::pair<std::vector<Sample>, std::vector<Sample>> split_train_validation(
    SampleSpan samples, std::size_t train, std::size_t validation,
    std::uint64_t seed);

// Concatenation of the shards' samples in shard order.
std::vector<Sample> pool(const std::vector<Shard>& shards);

}  // namespace hfcl::data
