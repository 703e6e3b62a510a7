#include "core/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fdreg {

namespace {

void validate_schedule(const TrainingSchedule& s) {
  if (s.rounds < 1) throw ConfigError("schedule: rounds must be at least 1");
  if (s.local_epochs < 1) throw ConfigError("schedule: local_epochs must be at least 1");
  if (s.batch_size < 1) throw ConfigError("schedule: batch_size must be at least 1");
  if (s.lambda < 0.0) throw ConfigError("schedule: lambda must be nonnegative");
}

struct PhaseResult {
  double loss_sum = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t steps = 0;

  double mean_loss() const {
    return samples == 0 ? 0.0 : loss_sum / static_cast<double>(samples);
  }
};

// One client's local training for `epochs` epochs: seeded shuffle, batched
// summed-gradient Adam steps, and (for distillation phases) label-indexed
// accumulation of the predictions each batch's gradient saw.
PhaseResult train_local(ClientState& client, std::uint32_t epochs,
                        const LossConfig& loss_config, const SegmentScheme* scheme,
                        bool accumulate_stats, const TrainingSchedule& schedule) {
  const std::size_t n = client.shard.rows();
  if (n == 0) {
    throw ConfigError("client " + std::to_string(client.id) + " has an empty shard");
  }
  const TeacherTable* teacher =
      loss_config.mode == LossMode::kDistill ? &client.teacher : nullptr;

  std::vector<std::size_t> order(n);
  std::vector<Sample> batch;
  batch.reserve(schedule.batch_size);
  ParamGrads grads = make_zero_grads(client.model);
  std::vector<double> predictions;
  std::vector<double>* predictions_out = accumulate_stats ? &predictions : nullptr;
  const std::size_t no = client.model.output_units();

  PhaseResult result;
  for (std::uint32_t e = 0; e < epochs; ++e) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(mix_seed(client.seed, kStreamShuffle, client.epochs_run));
    shuffle_rng.shuffle(order);
    client.epochs_run += 1;
    for (std::size_t start = 0; start < n; start += schedule.batch_size) {
      const std::size_t stop = std::min(n, start + schedule.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(
            {client.shard.feature_row(order[i]), client.shard.target_row(order[i])});
      }
      const double batch_loss = loss_and_gradient(client.model, batch, loss_config, scheme,
                                                  teacher, grads, predictions_out);
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged("non-finite training loss (client " +
                               std::to_string(client.id) + ")");
      }
      adam_step(client.model, client.optimizer, grads);
      if (accumulate_stats) {
        for (std::size_t i = start; i < stop; ++i) {
          client.stats.accumulate(client.shard.target_row(order[i]),
                                  {predictions.data() + (i - start) * no, no}, *scheme);
        }
      }
      result.loss_sum += batch_loss;
      result.samples += stop - start;
      result.steps += 1;
    }
  }
  return result;
}

void check_params_finite(const ClientState& client, std::uint32_t round) {
  if (!client.model.finite()) {
    throw TrainingDiverged("non-finite model parameters after round " +
                           std::to_string(round) + " (client " +
                           std::to_string(client.id) + ")");
  }
}

// Client indices sorted by id. All accumulation, aggregation, and report
// emission walks this order, so permuting the caller's list changes
// nothing observable.
std::vector<std::size_t> canonical_order(std::span<const ClientState> clients) {
  std::vector<std::size_t> order(clients.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return clients[a].id < clients[b].id; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (clients[order[i]].id < 1) throw ConfigError("client ids start at 1");
    if (i > 0 && clients[order[i]].id == clients[order[i - 1]].id) {
      throw ConfigError("client ids must be distinct");
    }
  }
  return order;
}

void for_each_client(std::vector<ClientState>& clients, bool parallel,
                     const std::function<void(std::size_t)>& work) {
  if (!parallel || clients.size() < 2) {
    for (std::size_t i = 0; i < clients.size(); ++i) work(i);
    return;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    futures.push_back(std::async(std::launch::async, work, i));
  }
  std::exception_ptr first;
  for (auto& f : futures) {
    try {
      f.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

void check_same_architecture(std::span<const ClientState> clients) {
  for (const auto& c : clients) {
    if (c.model.input_units() != clients[0].model.input_units() ||
        c.model.hidden_units() != clients[0].model.hidden_units() ||
        c.model.output_units() != clients[0].model.output_units()) {
      throw ConfigError("clients must share one model architecture");
    }
  }
}

MlpModel weighted_average(std::span<const ClientState> clients,
                          std::span<const std::size_t> order) {
  double total = 0.0;
  for (const auto& c : clients) total += static_cast<double>(c.shard.rows());
  MlpModel average = clients[order[0]].model;
  std::fill(average.input_weights.data.begin(), average.input_weights.data.end(), 0.0);
  std::fill(average.hidden_bias.begin(), average.hidden_bias.end(), 0.0);
  std::fill(average.output_weights.data.begin(), average.output_weights.data.end(), 0.0);
  std::fill(average.output_bias.begin(), average.output_bias.end(), 0.0);
  const auto add_scaled = [](std::vector<double>& acc, const std::vector<double>& src,
                             double w) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * src[i];
  };
  for (const std::size_t i : order) {
    const double w = static_cast<double>(clients[i].shard.rows()) / total;
    add_scaled(average.input_weights.data, clients[i].model.input_weights.data, w);
    add_scaled(average.hidden_bias, clients[i].model.hidden_bias, w);
    add_scaled(average.output_weights.data, clients[i].model.output_weights.data, w);
    add_scaled(average.output_bias, clients[i].model.output_bias, w);
  }
  return average;
}

}  // namespace

ClientState make_client(int id, FingerprintDataset shard, std::size_t hidden_units,
                        const TrainingSchedule& schedule) {
  if (id < 1) throw ConfigError("client ids start at 1");
  if (shard.rows() == 0) throw ConfigError("client shard must be non-empty");
  ClientState client;
  client.id = id;
  client.seed = mix_seed(schedule.seed, kStreamClient, static_cast<std::uint64_t>(id));
  client.shard = std::move(shard);
  client.model = init_model(client.shard.feature_dim, hidden_units,
                            client.shard.target_dim, mix_seed(client.seed, kStreamInit));
  client.optimizer = init_adam(client.model, schedule.learning_rate, schedule.beta1,
                               schedule.beta2, schedule.epsilon);
  return client;
}

MlpModel federated_average(std::span<const ClientState> clients) {
  if (clients.empty()) throw ConfigError("federated_average needs at least one client");
  check_same_architecture(clients);
  std::vector<std::size_t> identity(clients.size());
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  return weighted_average(clients, identity);
}

EvalResult evaluate_model(const MlpModel& model, const FingerprintDataset& dataset) {
  if (dataset.rows() == 0) {
    EvalResult empty;
    empty.mae = std::numeric_limits<double>::quiet_NaN();
    empty.rmse = std::numeric_limits<double>::quiet_NaN();
    return empty;
  }
  if (dataset.target_dim != model.output_units()) {
    throw ConfigError("evaluation targets do not match the model output dimension");
  }
  const std::size_t no = model.output_units();
  std::vector<double> predictions(dataset.rows() * no, 0.0);
  for (std::size_t i = 0; i < dataset.rows(); ++i) {
    forward(model, dataset.feature_row(i), {predictions.data() + i * no, no});
  }
  return evaluate(dataset.targets, predictions, dataset.target_dim);
}

std::vector<RoundReport> run_fd(std::vector<ClientState>& clients,
                                const SegmentScheme& scheme,
                                const TrainingSchedule& schedule, const CommsConfig& comms,
                                const FingerprintDataset& eval_set,
                                const RoundObserver& observer) {
  if (clients.size() < 2) {
    throw ConfigError("federated distillation needs at least two clients");
  }
  validate_schedule(schedule);
  const auto order = canonical_order(clients);
  const std::size_t no = scheme.dimensions();
  for (auto& c : clients) {
    if (c.model.output_units() != no) {
      throw ConfigError("segment scheme dimension does not match the client models");
    }
    c.stats = SegmentStats(no, scheme.segment_count());
  }

  const LossConfig plain{LossMode::kPlain, 0.0};
  const LossConfig distill{LossMode::kDistill, schedule.lambda};
  std::vector<PhaseResult> phase(clients.size());

  const auto train_phase = [&](const LossConfig& mode, std::uint32_t epochs) {
    for_each_client(clients, schedule.parallel_clients, [&](std::size_t i) {
      phase[i] = train_local(clients[i], epochs, mode, &scheme, true, schedule);
    });
  };
  // Finalized averages go up in id order; teachers come back down and
  // stats restart for the next round.
  const auto exchange = [&](std::uint32_t round) {
    std::vector<SegmentTable> uploads;
    uploads.reserve(clients.size());
    for (const std::size_t i : order) uploads.push_back(clients[i].stats.finalize());
    auto teachers = server_distill(uploads, round);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      clients[order[rank]].teacher = std::move(teachers[rank]);
      clients[order[rank]].stats.reset();
    }
  };

  try {
    train_phase(plain, schedule.warmup_epochs);
  } catch (const TrainingDiverged& e) {
    throw TrainingDiverged(std::string(e.what()) + " during warm-up");
  }
  exchange(0);

  const std::uint64_t payload =
      fd_bits_per_client_round(scheme.segment_count(), no, comms.bits_resolution);

  std::vector<RoundReport> history;
  history.reserve(clients.size() * schedule.rounds);
  std::uint64_t cum_bits = 0;
  double cum_energy = 0.0;
  for (std::uint32_t round = 1; round <= schedule.rounds; ++round) {
    try {
      train_phase(distill, schedule.local_epochs);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " in round " + std::to_string(round));
    }
    for (const std::size_t i : order) check_params_finite(clients[i], round);
    exchange(round);

    cum_bits += clients.size() * payload;
    for (const std::size_t i : order) {
      cum_energy += static_cast<double>(phase[i].steps) *
                        static_cast<double>(clients[i].model.parameter_count()) *
                        comms.energy_per_param_update_j +
                    static_cast<double>(payload) * comms.energy_per_bit_j;
    }
    for (const std::size_t i : order) {
      const EvalResult eval = evaluate_model(clients[i].model, eval_set);
      history.push_back({round, clients[i].id, phase[i].mean_loss(), eval.mae, eval.rmse,
                         cum_bits, cum_energy});
    }
    if (observer) observer(round, clients);
  }
  return history;
}

std::vector<RoundReport> run_fl(std::vector<ClientState>& clients,
                                const TrainingSchedule& schedule, const CommsConfig& comms,
                                const FingerprintDataset& eval_set,
                                const RoundObserver& observer) {
  if (clients.empty()) throw ConfigError("federated averaging needs at least one client");
  validate_schedule(schedule);
  check_same_architecture(clients);
  const auto order = canonical_order(clients);

  const std::size_t ni = clients[0].model.input_units();
  const std::size_t nh = clients[0].model.hidden_units();
  const std::size_t no = clients[0].model.output_units();
  MlpModel global = init_model(ni, nh, no, mix_seed(schedule.seed, kStreamGlobalInit));
  for (auto& c : clients) c.model = global;

  const LossConfig plain{LossMode::kPlain, 0.0};
  const std::uint64_t payload = fl_bits_per_client_round(ni, nh, no, comms.bits_resolution);
  std::vector<PhaseResult> phase(clients.size());

  std::vector<RoundReport> history;
  history.reserve(clients.size() * schedule.rounds);
  std::uint64_t cum_bits = 0;
  double cum_energy = 0.0;
  for (std::uint32_t round = 1; round <= schedule.rounds; ++round) {
    try {
      for_each_client(clients, schedule.parallel_clients, [&](std::size_t i) {
        phase[i] = train_local(clients[i], schedule.local_epochs, plain, nullptr, false,
                               schedule);
      });
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " in round " + std::to_string(round));
    }
    for (const std::size_t i : order) check_params_finite(clients[i], round);

    global = weighted_average(clients, order);
    for (auto& c : clients) c.model = global;  // noiseless download

    cum_bits += clients.size() * payload;
    for (const std::size_t i : order) {
      cum_energy += static_cast<double>(phase[i].steps) *
                        static_cast<double>(clients[i].model.parameter_count()) *
                        comms.energy_per_param_update_j +
                    static_cast<double>(payload) * comms.energy_per_bit_j;
    }
    const EvalResult eval = evaluate_model(global, eval_set);
    for (const std::size_t i : order) {
      history.push_back({round, clients[i].id, phase[i].mean_loss(), eval.mae, eval.rmse,
                         cum_bits, cum_energy});
    }
    if (observer) observer(round, clients);
  }
  return history;
}

std::vector<RoundReport> run_standalone(ClientState& client,
                                        const TrainingSchedule& schedule,
                                        const CommsConfig& comms,
                                        const FingerprintDataset& eval_set,
                                        const RoundObserver& observer) {
  validate_schedule(schedule);
  const LossConfig plain{LossMode::kPlain, 0.0};

  // Warm-up epochs mirror run_fd so that a lambda=0 distillation run and a
  // standalone run consume identical shuffle streams.
  try {
    train_local(client, schedule.warmup_epochs, plain, nullptr, false, schedule);
  } catch (const TrainingDiverged& e) {
    throw TrainingDiverged(std::string(e.what()) + " during warm-up");
  }

  std::vector<RoundReport> history;
  history.reserve(schedule.rounds);
  double cum_energy = 0.0;
  for (std::uint32_t round = 1; round <= schedule.rounds; ++round) {
    PhaseResult phase;
    try {
      phase = train_local(client, schedule.local_epochs, plain, nullptr, false, schedule);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " in round " + std::to_string(round));
    }
    check_params_finite(client, round);
    cum_energy += static_cast<double>(phase.steps) *
                  static_cast<double>(client.model.parameter_count()) *
                  comms.energy_per_param_update_j;
    const EvalResult eval = evaluate_model(client.model, eval_set);
    history.push_back(
        {round, client.id, phase.mean_loss(), eval.mae, eval.rmse, 0, cum_energy});
    if (observer) observer(round, {&client, 1});
  }
  return history;
}

std::vector<RoundReport> run_centralized(const FingerprintDataset& all_data,
                                         std::size_t hidden_units,
                                         const TrainingSchedule& schedule,
                                         const CommsConfig& comms,
                                         const FingerprintDataset& eval_set,
                                         MlpModel* final_model,
                                         const RoundObserver& observer) {
  if (all_data.rows() == 0) {
    throw ConfigError("centralized training needs a non-empty dataset");
  }
  validate_schedule(schedule);
  ClientState trainer = make_client(1, all_data, hidden_units, schedule);
  // Same initialization stream run_fl broadcasts, so FL with one client
  // reproduces this trajectory; the epoch budget is rounds * local_epochs
  // with no warm-up, matching the federated rounds.
  trainer.model = init_model(trainer.model.input_units(), hidden_units,
                             trainer.model.output_units(),
                             mix_seed(schedule.seed, kStreamGlobalInit));
  const LossConfig plain{LossMode::kPlain, 0.0};

  std::vector<RoundReport> history;
  history.reserve(schedule.rounds);
  double cum_energy = 0.0;
  for (std::uint32_t round = 1; round <= schedule.rounds; ++round) {
    PhaseResult phase;
    try {
      phase = train_local(trainer, schedule.local_epochs, plain, nullptr, false, schedule);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged(std::string(e.what()) + " in round " + std::to_string(round));
    }
    check_params_finite(trainer, round);
    cum_energy += static_cast<double>(phase.steps) *
                  static_cast<double>(trainer.model.parameter_count()) *
                  comms.energy_per_param_update_j;
    const EvalResult eval = evaluate_model(trainer.model, eval_set);
    history.push_back(
        {round, trainer.id, phase.mean_loss(), eval.mae, eval.rmse, 0, cum_energy});
    if (observer) observer(round, {&trainer, 1});
  }
  if (final_model != nullptr) *final_model = trainer.model;
  return history;
}

void write_round_reports_csv(std::ostream& out, std::span<const RoundReport> reports) {
  out << "round,client_id,train_loss,val_mae,val_rmse,cum_bits,cum_energy\n";
  for (const RoundReport& r : reports) {
    out << r.round << ',' << r.client_id << ',' << format_double(r.train_loss) << ','
        << format_double(r.val_mae) << ',' << format_double(r.val_rmse) << ',' << r.cum_bits
        << ',' << format_double(r.cum_energy_j) << '\n';
  }
}

}  // namespace fdreg
