#include "hfcl/comms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hfcl/error.hpp"

namespace hfcl::comms {
namespace {

using u128 = unsigned __int128;

std::uint64_t narrow(u128 v, const char* what) {
  if (v > std::numeric_limits<std::uint64_t>::max()) {
    throw ConfigError(std::string(what) + " overflows 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t to_blocks(std::uint64_t symbols) {
  return symbols / kSymbolsPerBlock + (symbols % kSymbolsPerBlock != 0);
}

std::uint64_t overhead_cl(std::uint64_t dataset_symbols) {
  return dataset_symbols;
}

std::uint64_t overhead_fl(std::uint64_t rounds, std::uint64_t params,
                          std::uint64_t clients) {
  if (rounds == 0 || params == 0 || clients == 0) {
    throw ConfigError("FL overhead needs positive rounds, parameters, clients");
  }
  return narrow(u128{2} * rounds * params * clients, "FL overhead");
}

std::uint64_t overhead_hfcl(std::uint64_t rounds, std::uint64_t params,
                            std::uint64_t clients,
                            std::span<const std::uint64_t> passive_symbols) {
  if (passive_symbols.size() > clients) {
    throw ConfigError("more passive clients than clients");
  }
  u128 total = u128{2} * rounds * params * (clients - passive_symbols.size());
  for (std::uint64_t d : passive_symbols) total += d;
  return narrow(total, "HFCL overhead");
}

std::uint64_t overhead_hfcl(std::uint64_t rounds, std::uint64_t params,
                            std::uint64_t clients, std::uint64_t passive,
                            std::uint64_t symbols_per_shard) {
  if (passive > clients) throw ConfigError("more passive clients than clients");
  const u128 total = u128{passive} * symbols_per_shard +
                     u128{2} * rounds * params * (clients - passive);
  return narrow(total, "HFCL overhead");
}

OverheadReport make_report(std::uint64_t dataset_symbols, std::uint64_t rounds,
                           std::uint64_t params, std::uint64_t clients,
                           std::vector<std::uint64_t> passive_symbols) {
  OverheadReport r;
  r.dataset_symbols = dataset_symbols;
  r.rounds = rounds;
  r.params = params;
  r.clients = clients;
  r.passive = passive_symbols.size();
  r.cl = overhead_cl(dataset_symbols);
  r.fl = overhead_fl(rounds, params, clients);
  r.hfcl = overhead_hfcl(rounds, params, clients, passive_symbols);
  r.passive_symbols = std::move(passive_symbols);
  return r;
}

double rate(const LinkSpec& link) {
  return link.bandwidth * std::log1p(link.snr);
}

double delay(const LinkSpec& link) {
  if (link.symbols == 0) return 0.0;
  if (!(link.bandwidth > 0.0)) {
    throw ConfigError("client " + std::to_string(link.client) +
                      " has no bandwidth");
  }
  if (!(link.snr > 0.0)) {
    throw ConfigError("client " + std::to_string(link.client) +
                      " has non-positive SNR");
  }
  return static_cast<double>(link.symbols) / rate(link);
}

std::vector<LinkSpec> allocate_bandwidth(std::vector<LinkSpec> links,
                                         double total_bandwidth) {
  if (links.empty()) throw ConfigError("no links to allocate bandwidth to");
  if (!(total_bandwidth > 0.0)) throw ConfigError("bandwidth budget must be positive");
  double weight_sum = 0.0;
  for (const auto& l : links) {
    if (!(l.snr > 0.0)) {
      throw ConfigError("client " + std::to_string(l.client) +
                        " has non-positive SNR");
    }
    weight_sum += static_cast<double>(l.symbols) / std::log1p(l.snr);
  }
  if (weight_sum == 0.0) throw ConfigError("no link has symbols to send");
  for (auto& l : links) {
    const double w = static_cast<double>(l.symbols) / std::log1p(l.snr);
    l.bandwidth = total_bandwidth * (w / weight_sum);
  }
  return links;
}

double max_delay(std::span<const LinkSpec> links) {
  double worst = 0.0;
  for (const auto& l : links) worst = std::max(worst, delay(l));
  return worst;
}

}  // namespace hfcl::comms
