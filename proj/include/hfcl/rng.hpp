#pragma once

#include <cstdint>
#include <random>

namespace hfcl {

using Rng = std::mt19937_64;

// Independent purposes that draw randomness. Each gets its own stream so that
// enabling one feature (say, channel noise) never shifts the draws of another.
enum class Stream : std::uint64_t {
  kInit = 1,
  kPartition = 2,
  kMiniBatch = 3,
  kGradientChannel = 4,
  kDatasetChannel = 5,
  kSubsample = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the (stream, client, round) cell. Derivation depends only on its
// arguments, so parallel clients draw the same numbers in any schedule.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t client = 0,
                                    std::uint64_t round = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  h = splitmix64(h ^ (client + 0x51ed270b27f1ULL));
  h = splitmix64(h ^ (round + 0x2545f4914f6cdd1dULL));
  return h;
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t client = 0,
                    std::uint64_t round = 0) {
  return Rng(derive_seed(seed, stream, client, round));
}

}  // namespace hfcl
