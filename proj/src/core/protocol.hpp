#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "core/comms.hpp"
#include "core/dataset.hpp"
#include "core/metrics.hpp"
#include "core/nn.hpp"
#include "core/segmentation.hpp"

namespace fdreg {

struct TrainingSchedule {
  std::uint32_t rounds = 100;
  std::uint32_t local_epochs = 1;   // per communication round
  std::uint32_t warmup_epochs = 1;  // pre-round plain training
  std::uint32_t batch_size = 32;
  double lambda = 0.1;
  double learning_rate = 1e-4;
  double beta1 = 0.1;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::uint64_t seed = 200;          // master seed, fanned out per client
  bool parallel_clients = true;
};

struct ClientState {
  int id = 0;                // distinct, >= 1
  std::uint64_t seed = 0;    // this client's stream seed
  FingerprintDataset shard;
  MlpModel model;
  AdamState optimizer;
  SegmentStats stats;        // reset every round
  TeacherTable teacher;      // built from the previous round's uploads
  std::uint64_t epochs_run = 0;  // drives the per-epoch shuffle stream
};

// Client with its own init and shuffle streams derived from the schedule's
// master seed and the client id; adding clients never disturbs another
// client's streams.
ClientState make_client(int id, FingerprintDataset shard, std::size_t hidden_units,
                        const TrainingSchedule& schedule);

// One (round, client) row. cum_bits and cum_energy_j are network-wide
// cumulative totals over all participating clients up to this round.
struct RoundReport {
  std::uint32_t round = 0;
  int client_id = 0;
  double train_loss = 0.0;  // mean per-sample loss over the round
  double val_mae = 0.0;
  double val_rmse = 0.0;
  std::uint64_t cum_bits = 0;
  double cum_energy_j = 0.0;
};

using RoundObserver = std::function<void(std::uint32_t round, std::span<const ClientState>)>;

// Federated distillation, K >= 2. Warm-up: every client trains
// `warmup_epochs` with the plain loss while accumulating label-indexed
// prediction stats, and the first teachers are distilled from those
// uploads. Each round then trains `local_epochs` against the previous
// round's teachers, uploads finalized per-segment averages, and receives
// next-round teachers. Uplink cost is segments * outputs * resolution bits
// per client per round.
std::vector<RoundReport> run_fd(std::vector<ClientState>& clients,
                                const SegmentScheme& scheme,
                                const TrainingSchedule& schedule, const CommsConfig& comms,
                                const FingerprintDataset& eval_set,
                                const RoundObserver& observer = {});

// FedAvg with full participation: every round each client trains from the
// current global model and the server replaces it with the shard-size
// weighted parameter average. Uplink cost is the full parameter vector.
std::vector<RoundReport> run_fl(std::vector<ClientState>& clients,
                                const TrainingSchedule& schedule, const CommsConfig& comms,
                                const FingerprintDataset& eval_set,
                                const RoundObserver& observer = {});

// Plain local training with no communication; mirrors run_fd's phase
// structure (warm-up then rounds) so that seeds and epoch streams align.
std::vector<RoundReport> run_standalone(ClientState& client,
                                        const TrainingSchedule& schedule,
                                        const CommsConfig& comms,
                                        const FingerprintDataset& eval_set,
                                        const RoundObserver& observer = {});

// One model on the union of all shards, trained rounds x local_epochs
// epochs (no warm-up) from the same initialization stream run_fl
// broadcasts, so a single-client FL run reproduces it exactly.
std::vector<RoundReport> run_centralized(const FingerprintDataset& all_data,
                                         std::size_t hidden_units,
                                         const TrainingSchedule& schedule,
                                         const CommsConfig& comms,
                                         const FingerprintDataset& eval_set,
                                         MlpModel* final_model = nullptr,
                                         const RoundObserver& observer = {});

// Shard-size weighted average of the clients' parameters.
MlpModel federated_average(std::span<const ClientState> clients);

EvalResult evaluate_model(const MlpModel& model, const FingerprintDataset& dataset);

// Columns: round,client_id,train_loss,val_mae,val_rmse,cum_bits,cum_energy
void write_round_reports_csv(std::ostream& out, std::span<const RoundReport> reports);

}  // namespace fdreg
