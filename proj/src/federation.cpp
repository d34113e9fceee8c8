#include "hfcl/federation.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#include "hfcl/comms.hpp"
#include "hfcl/error.hpp"

namespace hfcl::federation {
namespace {

// Runs fn(i) for i in [0, n) on the OpenMP team. The first exception thrown
// by any iteration is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr failure;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void add_mean(std::span<const nn::GradientVector> grads, std::vector<double>& dir) {
  if (grads.empty()) return;
  std::vector<double> sum(dir.size(), 0.0);
  for (const auto& g : grads) {
    if (g.size() != dir.size()) {
      throw ShapeError("gradient from client " + std::to_string(g.source) +
                       " has length " + std::to_string(g.size()) +
                       ", expected " + std::to_string(dir.size()));
    }
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += g.g[j];
  }
  const double inv = 1.0 / static_cast<double>(grads.size());
  for (std::size_t j = 0; j < dir.size(); ++j) dir[j] += sum[j] * inv;
}

struct Participants {
  std::size_t passive_begin = 0, passive_end = 0;
  std::size_t active_begin = 0, active_end = 0;
};

Participants participants(Mode mode, const Roster& roster) {
  const std::size_t k = roster.clients();
  const std::size_t l = roster.passive;
  switch (mode) {
    case Mode::kCl:
      return {0, k, k, k};
    case Mode::kFl:
      if (l != 0) {
        throw ConfigError("fl requires every client to be active (passive = 0)");
      }
      return {0, 0, 0, k};
    case Mode::kFlActiveOnly:
      if (l >= k) {
        throw ConfigError(
            "fl-active-only needs at least one active client (passive < clients)");
      }
      return {0, 0, l, k};
    case Mode::kHfcl:
    case Mode::kHfclSdt:
      return {0, l, l, k};
  }
  throw ConfigError("unknown mode");
}

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kCl: return "cl";
    case Mode::kFl: return "fl";
    case Mode::kFlActiveOnly: return "fl-active-only";
    case Mode::kHfcl: return "hfcl";
    case Mode::kHfclSdt: return "hfcl-sdt";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::kCl, Mode::kFl, Mode::kFlActiveOnly, Mode::kHfcl,
                 Mode::kHfclSdt}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + s +
                    "' (expected cl, fl, fl-active-only, hfcl, hfcl-sdt)");
}

const char* to_string(Aggregation a) {
  return a == Aggregation::kLiteral ? "literal" : "weighted";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "literal") return Aggregation::kLiteral;
  if (s == "weighted") return Aggregation::kWeighted;
  throw ConfigError("unknown aggregation '" + s + "' (expected literal, weighted)");
}

void Roster::validate() const {
  if (shards.empty()) throw ConfigError("roster has no clients");
  if (passive > shards.size()) {
    throw ConfigError("passive count " + std::to_string(passive) +
                      " exceeds client count " + std::to_string(shards.size()));
  }
  for (std::size_t k = 0; k < shards.size(); ++k) {
    if (shards[k].empty()) {
      throw ConfigError("client " + std::to_string(k) + " has an empty shard");
    }
  }
}

nn::ModelParams hfcl_aggregate(std::span<const nn::GradientVector> server,
                               std::span<const nn::GradientVector> device,
                               const nn::ModelParams& params, double eta) {
  std::vector<double> dir(params.size(), 0.0);
  add_mean(server, dir);
  add_mean(device, dir);
  nn::GradientVector step{std::move(dir), nn::Provenance::kClean, nn::kServer};
  return nn::sgd_step(params, step, eta);
}

nn::ModelParams weighted_aggregate(std::span<const nn::GradientVector> grads,
                                   std::span<const std::size_t> counts,
                                   const nn::ModelParams& params, double eta) {
  if (grads.size() != counts.size()) {
    throw ShapeError("one sample count is needed per gradient");
  }
  std::vector<double> dir(params.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].size() != dir.size()) {
      throw ShapeError("gradient length does not match parameters");
    }
    const double w = static_cast<double>(counts[i]);
    total += w;
    for (std::size_t j = 0; j < dir.size(); ++j) dir[j] += w * grads[i].g[j];
  }
  if (total > 0.0) {
    for (double& v : dir) v /= total;
  }
  nn::GradientVector step{std::move(dir), nn::Provenance::kClean, nn::kServer};
  return nn::sgd_step(params, step, eta);
}

std::size_t sdt_block_count(std::size_t shard_size, std::size_t block) {
  if (block == 0) throw ConfigError("SDT block size must be positive");
  return (shard_size + block - 1) / block;
}

std::size_t sdt_window_size(std::size_t t, std::size_t block,
                            std::size_t shard_size) {
  if (t < 1) throw ConfigError("rounds are numbered from 1");
  if (block == 0) throw ConfigError("SDT block size must be positive");
  // t > N implies t * block >= shard_size, so one min covers both branches.
  if (t > shard_size / block + 1) return shard_size;
  return std::min(t * block, shard_size);
}

nn::GradientVector sdt_window_gradient(const nn::ModelParams& params,
                                       data::SampleSpan received, std::size_t t,
                                       std::size_t block,
                                       std::size_t shard_size,
                                       const nn::TrainingConfig& training,
                                       Rng& rng) {
  const std::size_t window = sdt_window_size(t, block, shard_size);
  if (received.size() < window) {
    throw ConfigError("round " + std::to_string(t) + " needs " +
                      std::to_string(window) + " received samples, PS holds " +
                      std::to_string(received.size()));
  }
  const auto prefix = received.first(window);
  return nn::minibatch_gradient(params, prefix,
                                training.minibatches_for(window), rng,
                                training.loss);
}

RunResult run(Mode mode, const Roster& roster,
              std::shared_ptr<const nn::ModelSpec> spec, const RunConfig& config,
              data::SampleSpan validation) {
  roster.validate();
  config.training.validate();
  config.channel.validate();
  if (!spec->trainable()) {
    throw ConfigError("model preset counts parameters only and cannot be trained");
  }
  const Participants who = participants(mode, roster);
  const bool sdt = mode == Mode::kHfclSdt;
  const std::size_t k_total = roster.clients();
  const std::size_t p = spec->param_count();
  const std::uint64_t seed = config.training.seed;
  const auto& training = config.training;

  const std::vector<data::Sample> train_pool = data::pool(roster.shards);

  RunResult result;
  result.params = nn::init_params(spec, seed);
  std::vector<data::Shard> received(k_total);
  for (std::size_t k = who.passive_begin; k < who.passive_end; ++k) {
    received[k].client = static_cast<int>(k);
  }

  std::uint64_t cumulative = 0;
  for (std::size_t t = 1; t <= training.rounds; ++t) {
    RoundRecord rec;
    rec.round = t;
    rec.client_symbols.assign(k_total, 0);

    // Passive uploads arriving this round.
    parallel_for(who.passive_end - who.passive_begin, [&](std::size_t i) {
      const std::size_t k = who.passive_begin + i;
      const data::Shard& shard = roster.shards[k];
      std::size_t begin = 0, end = 0, block_index = 0;
      if (!sdt) {
        if (t != 1) return;
        end = shard.size();
      } else {
        if (t > sdt_block_count(shard.size(), p)) return;
        block_index = t - 1;
        begin = block_index * p;
        end = std::min(begin + p, shard.size());
      }
      data::Shard block;
      block.client = shard.client;
      block.samples.assign(shard.samples.begin() + static_cast<long>(begin),
                           shard.samples.begin() + static_cast<long>(end));
      Rng rng = make_rng(seed, Stream::kDatasetChannel, k, block_index);
      data::Shard noisy = channel::transmit_dataset(block, config.channel, rng);
      auto& store = received[k].samples;
      store.insert(store.end(), std::make_move_iterator(noisy.samples.begin()),
                   std::make_move_iterator(noisy.samples.end()));
      rec.client_symbols[k] = data::symbol_count(block.samples);
    });

    // Gradients, one slot per client so the reduction order is fixed.
    std::vector<nn::GradientVector> grads(k_total);
    std::vector<std::size_t> counts(k_total, 0);
    const std::size_t first = who.passive_begin;
    const std::size_t n_participants =
        (who.passive_end - who.passive_begin) + (who.active_end - who.active_begin);
    const nn::ModelParams& theta = result.params;
    parallel_for(n_participants, [&](std::size_t i) {
      std::size_t k = first + i;
      const bool passive = k < who.passive_end;
      if (!passive) k = who.active_begin + (i - (who.passive_end - who.passive_begin));
      Rng rng = make_rng(seed, Stream::kMiniBatch, k, t);
      if (passive) {
        const auto& store = received[k].samples;
        if (sdt) {
          grads[k] = sdt_window_gradient(theta, store, t, p,
                                         roster.shards[k].size(), training, rng);
          counts[k] = sdt_window_size(t, p, roster.shards[k].size());
        } else {
          grads[k] = nn::minibatch_gradient(
              theta, store, training.minibatches_for(store.size()), rng,
              training.loss);
          counts[k] = store.size();
        }
        grads[k].source = static_cast<int>(k);
      } else {
        const auto& local = roster.shards[k].samples;
        nn::GradientVector g = nn::minibatch_gradient(
            theta, local, training.minibatches_for(local.size()), rng,
            training.loss);
        g.source = static_cast<int>(k);
        Rng link = make_rng(seed, Stream::kGradientChannel, k, t);
        grads[k] = channel::transmit_gradient(g, config.channel, link);
        counts[k] = local.size();
        rec.client_symbols[k] = 2 * static_cast<std::uint64_t>(p);
      }
    });

    std::vector<nn::GradientVector> server, device;
    std::vector<nn::GradientVector> all;
    std::vector<std::size_t> all_counts;
    for (std::size_t k = who.passive_begin; k < who.passive_end; ++k) {
      server.push_back(grads[k]);
    }
    for (std::size_t k = who.active_begin; k < who.active_end; ++k) {
      device.push_back(grads[k]);
    }
    nn::ModelParams next;
    if (config.aggregation == Aggregation::kLiteral) {
      next = hfcl_aggregate(server, device, theta, training.eta);
    } else {
      for (std::size_t k = 0; k < k_total; ++k) {
        if (counts[k] == 0) continue;
        all.push_back(grads[k]);
        all_counts.push_back(counts[k]);
      }
      next = weighted_aggregate(all, all_counts, theta, training.eta);
    }

    double step_sq = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double d = theta.theta[j] - next.theta[j];
      step_sq += d * d;
    }
    rec.gradient_norm = std::sqrt(step_sq) / training.eta;
    result.params = std::move(next);

    // Uplink delay of this round: datasets for passive, P for active.
    std::vector<comms::LinkSpec> links;
    const double link_snr = comms::db_to_linear(config.links.snr_db);
    for (std::size_t k = 0; k < k_total; ++k) {
      std::uint64_t up = rec.client_symbols[k];
      if (k >= who.active_begin && k < who.active_end) up = p;
      if (up == 0) continue;
      links.push_back({static_cast<int>(k), up, link_snr, 0.0});
    }
    if (!links.empty()) {
      links = comms::allocate_bandwidth(std::move(links),
                                        config.links.total_bandwidth_hz);
      rec.max_delay_s = comms::max_delay(links);
    }

    for (std::uint64_t s : rec.client_symbols) rec.round_symbols += s;
    cumulative += rec.round_symbols;
    rec.cumulative_symbols = cumulative;
    rec.train_loss = nn::evaluate_loss(result.params, train_pool, training.loss);
    if (!validation.empty()) {
      rec.val_accuracy = nn::evaluate_accuracy(result.params, validation);
    }
    if (config.record_trajectory) result.trajectory.push_back(result.params.theta);
    result.ledger.push_back(std::move(rec));
  }
  return result;
}

RunResult run_cl(const Roster& roster, std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation) {
  return run(Mode::kCl, roster, std::move(spec), config, validation);
}

RunResult run_cl(data::SampleSpan dataset,
                 std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation) {
  Roster roster;
  roster.passive = 1;
  roster.shards.push_back({0, {dataset.begin(), dataset.end()}});
  return run(Mode::kCl, roster, std::move(spec), config, validation);
}

RunResult run_fl(const Roster& roster, std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation) {
  return run(Mode::kFl, roster, std::move(spec), config, validation);
}

RunResult run_fl_active_only(const Roster& roster,
                             std::shared_ptr<const nn::ModelSpec> spec,
                             const RunConfig& config,
                             data::SampleSpan validation) {
  return run(Mode::kFlActiveOnly, roster, std::move(spec), config, validation);
}

RunResult run_hfcl(const Roster& roster,
                   std::shared_ptr<const nn::ModelSpec> spec,
                   const RunConfig& config, data::SampleSpan validation) {
  return run(Mode::kHfcl, roster, std::move(spec), config, validation);
}

RunResult run_hfcl_sdt(const Roster& roster,
                       std::shared_ptr<const nn::ModelSpec> spec,
                       const RunConfig& config, data::SampleSpan validation) {
  return run(Mode::kHfclSdt, roster, std::move(spec), config, validation);
}

double evaluate(const nn::ModelParams& params, data::SampleSpan validation) {
  return nn::evaluate_accuracy(params, validation);
}

std::uint64_t expected_overhead(Mode mode, const Roster& roster,
                                std::size_t rounds, std::size_t params) {
  const std::size_t k = roster.clients();
  const std::size_t l = roster.passive;
  switch (mode) {
    case Mode::kCl: {
      std::uint64_t total = 0;
      for (const auto& s : roster.shards) total += data::symbol_count(s);
      return comms::overhead_cl(total);
    }
    case Mode::kFl:
      return comms::overhead_fl(rounds, params, k);
    case Mode::kFlActiveOnly:
      return comms::overhead_fl(rounds, params, k - l);
    case Mode::kHfcl:
    case Mode::kHfclSdt: {
      std::vector<std::uint64_t> passive;
      for (std::size_t i = 0; i < l; ++i) {
        passive.push_back(data::symbol_count(roster.shards[i]));
      }
      return comms::overhead_hfcl(rounds, params, k, passive);
    }
  }
  throw ConfigError("unknown mode");
}

}  // namespace hfcl::federation
