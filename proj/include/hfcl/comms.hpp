#pragma once

// Communication overhead (in transmitted symbols) and uplink delay.
//
//   T_CL   = D                       every dataset symbol, once
//   T_FL   = 2 T P K                 P up + P down per client per round
//   T_HFCL = sum_{k in passive} d_k + 2 T P (K - L)
//
// A "block" is 1000 symbols.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace hfcl::comms {

inline constexpr std::uint64_t kSymbolsPerBlock = 1000;

// Whole blocks needed to carry `symbols`, rounded up.
std::uint64_t to_blocks(std::uint64_t symbols);

std::uint64_t overhead_cl(std::uint64_t dataset_symbols);

// Throws ConfigError on zero arguments or 64-bit overflow.
std::uint64_t overhead_fl(std::uint64_t rounds, std::uint64_t params,
                          std::uint64_t clients);

// `passive_symbols` holds d_k for each of the L passive clients.
std::uint64_t overhead_hfcl(std::uint64_t rounds, std::uint64_t params,
                            std::uint64_t clients,
                            std::span<const std::uint64_t> passive_symbols);

// Uniform-shard form, L * d_k + 2 T P (K - L).
std::uint64_t overhead_hfcl(std::uint64_t rounds, std::uint64_t params,
                            std::uint64_t clients, std::uint64_t passive,
                            std::uint64_t symbols_per_shard);

struct OverheadReport {
  std::uint64_t dataset_symbols = 0;
  std::uint64_t rounds = 0;
  std::uint64_t params = 0;
  std::uint64_t clients = 0;
  std::uint64_t passive = 0;
  std::vector<std::uint64_t> passive_symbols;
  std::uint64_t cl = 0;
  std::uint64_t fl = 0;
  std::uint64_t hfcl = 0;
};

OverheadReport make_report(std::uint64_t dataset_symbols, std::uint64_t rounds,
                           std::uint64_t params, std::uint64_t clients,
                           std::vector<std::uint64_t> passive_symbols);

struct LinkSpec {
  int client = 0;
  std::uint64_t symbols = 0;
  // Linear, > 0.
  double snr = 1.0;
  // Hz; filled in by allocate_bandwidth.
  double bandwidth = 0.0;
};

// R_k = B_k ln(1 + SNR_k) symbols per second.
double rate(const LinkSpec& link);

// tau_k = d_k / R_k. Zero symbols take zero time; otherwise throws
// ConfigError for non-positive bandwidth or SNR.
double delay(const LinkSpec& link);

// Min-max delay allocation under sum_k B_k = total_bandwidth:
// B_k proportional to d_k / ln(1 + SNR_k), which equalizes every nonzero
// delay. Links with d_k = 0 get no bandwidth. Throws ConfigError for an
// empty list, non-positive budget or SNR, or when no link has demand.
std::vector<LinkSpec> allocate_bandwidth(std::vector<LinkSpec> links,
                                         double total_bandwidth);

double max_delay(std::span<const LinkSpec> links);

inline double db_to_linear(double db) {
  return std::pow(10.0, db / 10.0);
}

}  // namespace hfcl::comms
