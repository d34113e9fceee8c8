#pragma once

// Training protocols run by the parameter server (PS).
//
// Clients 0..L-1 are passive: they upload their dataset and the PS computes
// their gradients. Clients L..K-1 are active: they compute gradients locally
// and send them through the lossy uplink. Each round applies
//
//   theta <- theta - eta * ( mean_{passive} g_k + mean_{active} gbar_k )
//
// CL is the all-passive case, FL the all-active one. HFCL-SDT streams the
// passive datasets in blocks of P samples per round and lets the PS train on
// the growing prefix it has received so far.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hfcl/channel.hpp"
#include "hfcl/data/shard.hpp"
#include "hfcl/nn/model.hpp"
#include "hfcl/nn/ops.hpp"

namespace hfcl::federation {

enum class Mode { kCl, kFl, kFlActiveOnly, kHfcl, kHfclSdt };

const char* to_string(Mode m);
// Accepts cl, fl, fl-active-only, hfcl, hfcl-sdt. Throws ConfigError.
Mode parse_mode(const std::string& s);

// kLiteral: sum of the two group means. kWeighted: one mean over all
// contributing samples, for comparison.
enum class Aggregation { kLiteral, kWeighted };

const char* to_string(Aggregation a);
Aggregation parse_aggregation(const std::string& s);

struct Roster {
  std::size_t passive = 0;
  std::vector<data::Shard> shards;

  std::size_t clients() const { return shards.size(); }
  bool is_passive(std::size_t k) const { return k < passive; }
  // Throws ConfigError unless 0 <= L <= K, K >= 1 and no shard is empty.
  void validate() const;
};

// Bandwidth budget and link quality for the delay model. Delays are
// reported, not fed back into training.
struct LinkConfig {
  double total_bandwidth_hz = 1e6;
  double snr_db = 20.0;
};

struct RunConfig {
  nn::TrainingConfig training;
  channel::ChannelConfig channel;
  Aggregation aggregation = Aggregation::kLiteral;
  LinkConfig links;
  bool record_trajectory = false;
};

struct RoundRecord {
  std::size_t round = 0;
  // Symbols each client put on the air this round (index = client id).
  std::vector<std::uint64_t> client_symbols;
  std::uint64_t round_symbols = 0;
  std::uint64_t cumulative_symbols = 0;
  // ||theta_t - theta_{t+1}|| / eta.
  double gradient_norm = 0.0;
  // Mean loss over all clients' clean training data after the update.
  double train_loss = 0.0;
  // NaN when no validation set is given.
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
  // Min-max optimal uplink delay of this round; 0 when nothing is sent.
  double max_delay_s = 0.0;
};

struct RunResult {
  nn::ModelParams params;
  std::vector<RoundRecord> ledger;
  // theta after each round, when RunConfig::record_trajectory is set.
  std::vector<std::vector<double>> trajectory;

  std::uint64_t total_symbols() const {
    return ledger.empty() ? 0 : ledger.back().cumulative_symbols;
  }
};

// theta - eta * (mean(server) + mean(device)); an empty group contributes 0.
nn::ModelParams hfcl_aggregate(std::span<const nn::GradientVector> server,
                               std::span<const nn::GradientVector> device,
                               const nn::ModelParams& params, double eta);

// theta - eta * sum_k n_k g_k / sum_k n_k.
nn::ModelParams weighted_aggregate(std::span<const nn::GradientVector> grads,
                                   std::span<const std::size_t> counts,
                                   const nn::ModelParams& params, double eta);

// N = ceil(D_k / P).
std::size_t sdt_block_count(std::size_t shard_size, std::size_t block);
// Samples the PS holds for a passive client after round t: min(t P, D_k).
std::size_t sdt_window_size(std::size_t t, std::size_t block,
                            std::size_t shard_size);

// Passive-client gradient under sequential transmission: the mini-batch
// gradient over the first min(t P, D_k) received samples. For t > N that is
// the whole shard. `received` must hold at least that many samples.
nn::GradientVector sdt_window_gradient(const nn::ModelParams& params,
                                       data::SampleSpan received, std::size_t t,
                                       std::size_t block,
                                       std::size_t shard_size,
                                       const nn::TrainingConfig& training,
                                       Rng& rng);

// Generic driver behind the run_* entry points.
RunResult run(Mode mode, const Roster& roster,
              std::shared_ptr<const nn::ModelSpec> spec, const RunConfig& config,
              data::SampleSpan validation = {});

// The PS holds every shard; the roster's passive count is ignored.
RunResult run_cl(const Roster& roster, std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation = {});
// Single pooled dataset.
RunResult run_cl(data::SampleSpan dataset,
                 std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation = {});
// Requires roster.passive == 0.
RunResult run_fl(const Roster& roster, std::shared_ptr<const nn::ModelSpec> spec,
                 const RunConfig& config, data::SampleSpan validation = {});
// FL over the active clients only; the passive clients' data is never used.
// Requires roster.passive < K.
RunResult run_fl_active_only(const Roster& roster,
                             std::shared_ptr<const nn::ModelSpec> spec,
                             const RunConfig& config,
                             data::SampleSpan validation = {});
RunResult run_hfcl(const Roster& roster,
                   std::shared_ptr<const nn::ModelSpec> spec,
                   const RunConfig& config, data::SampleSpan validation = {});
RunResult run_hfcl_sdt(const Roster& roster,
                       std::shared_ptr<const nn::ModelSpec> spec,
                       const RunConfig& config,
                       data::SampleSpan validation = {});

// Classification accuracy in percent.
double evaluate(const nn::ModelParams& params, data::SampleSpan validation);

// Closed-form symbol total for a mode and roster, matching the ledger.
std::uint64_t expected_overhead(Mode mode, const Roster& roster,
                                std::size_t rounds, std::size_t params);

}  // namespace hfcl::federation
