#include "core/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"

namespace fdreg {

namespace fs = std::filesystem;

namespace {

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  localtime_r(&tt, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d-%02d%02d%02d", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

fs::path make_artifact_dir(const std::string& base, const std::string& kind) {
  fs::create_directories(base);
  const std::string stem = timestamp_now() + "-" + kind;
  fs::path dir = fs::path(base) / stem;
  for (int suffix = 2; fs::exists(dir); ++suffix) {
    dir = fs::path(base) / (stem + "-" + std::to_string(suffix));
  }
  fs::create_directories(dir);
  return dir;
}

RssiNetworkConfig resolved_network(const ExperimentConfig& cfg) {
  RssiNetworkConfig net = cfg.network;
  if (!cfg.network_seed_set) net.seed = mix_seed(cfg.seed, kStreamData);
  return net;
}

// Final per-sample errors of one model on the validation set. 2-D targets
// use the x/y column names; other dimensions fall back to generic names.
void write_errors_csv(const fs::path& path, const MlpModel& model,
                      const FingerprintDataset& val) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const std::size_t no = model.output_units();
  if (no == 2) {
    out << "x_true,y_true,x_pred,y_pred,abs_err_x,abs_err_y,eucl_err\n";
  } else {
    for (std::size_t d = 0; d < no; ++d) out << "y" << d << "_true,";
    for (std::size_t d = 0; d < no; ++d) out << "y" << d << "_pred,";
    for (std::size_t d = 0; d < no; ++d) out << "abs_err_" << d << ",";
    out << "eucl_err\n";
  }
  std::vector<double> pred(no, 0.0);
  for (std::size_t i = 0; i < val.rows(); ++i) {
    forward(model, val.feature_row(i), pred);
    const auto truth = val.target_row(i);
    for (std::size_t d = 0; d < no; ++d) out << format_double(truth[d]) << ',';
    for (std::size_t d = 0; d < no; ++d) out << format_double(pred[d]) << ',';
    double sq = 0.0;
    for (std::size_t d = 0; d < no; ++d) {
      const double e = truth[d] - pred[d];
      sq += e * e;
      out << format_double(std::abs(e)) << ',';
    }
    out << format_double(std::sqrt(sq)) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

void write_history_csv(const fs::path& path, std::span<const RoundReport> history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_round_reports_csv(out, history);
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

void write_point_artifacts(const fs::path& dir, const PointResult& result,
                           const FingerprintDataset& val) {
  write_history_csv(dir / "metrics.csv", result.history);
  for (const auto& [id, model] : result.models) {
    const std::string name = result.models.size() == 1 && result.spec.scheme == Scheme::kCentralized
                                 ? "errors.csv"
                                 : "errors_client_" + std::to_string(id) + ".csv";
    write_errors_csv(dir / name, model, val);
  }
  if (!result.teacher_rows.empty()) {
    std::ofstream out(dir / "teachers_final.csv");
    if (!out) throw IoError("cannot open teachers_final.csv for writing");
    write_segment_rows(out, result.teacher_rows);
  }
}

// Mean over the final round's per-client values.
struct FinalMetrics {
  double mae = 0.0;
  double rmse = 0.0;
  std::uint64_t total_bits = 0;
};

FinalMetrics final_metrics(const PointResult& result) {
  if (result.history.empty()) throw ConfigError("run produced an empty history");
  const std::uint32_t last_round = result.history.back().round;
  FinalMetrics final;
  std::size_t count = 0;
  for (const RoundReport& row : result.history) {
    if (row.round != last_round) continue;
    final.mae += row.val_mae;
    final.rmse += row.val_rmse;
    final.total_bits = row.cum_bits;
    ++count;
  }
  final.mae /= static_cast<double>(count);
  final.rmse /= static_cast<double>(count);
  return final;
}

// The bit column must reproduce the closed-form cost exactly.
void cross_check_bits(const ExperimentConfig& cfg, const PreparedData& prepared,
                      const PointResult& result, std::uint64_t total_bits) {
  std::uint64_t expected = 0;
  const std::uint64_t rounds = cfg.schedule.rounds;
  if (result.spec.scheme == Scheme::kFd) {
    expected = rounds * result.spec.clients *
               fd_bits_per_client_round(result.spec.segments, prepared.output_units,
                                        cfg.comms.bits_resolution);
  } else if (result.spec.scheme == Scheme::kFl) {
    expected = rounds * result.spec.clients *
               fl_bits_per_client_round(prepared.input_units, cfg.hidden_units,
                                        prepared.output_units, cfg.comms.bits_resolution);
  }
  if (expected != total_bits) {
    throw std::logic_error("bit accounting mismatch: history says " +
                           std::to_string(total_bits) + ", formula says " +
                           std::to_string(expected));
  }
}

std::string point_dir_name(const PointSpec& spec) {
  std::string name = scheme_name(spec.scheme) + "_k" + std::to_string(spec.clients);
  name += "_lambda" + format_double(spec.lambda);
  name += "_s" + std::to_string(spec.segments);
  return name;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg) {
  FingerprintDataset full;
  std::size_t repetitions = cfg.network.repetitions;
  if (cfg.source == DataSource::kSynthetic) {
    full = generate_fingerprints(resolved_network(cfg));
  } else {
    full = load_csv(cfg.csv_path, cfg.csv_schema);
  }
  if (full.rows() == 0) throw ConfigError("dataset is empty");

  TrainValSplit split = cfg.validation == ValidationSplit::kPerReference
                            ? split_last_repetition(full, repetitions)
                            : split_fraction(full, cfg.validation_fraction, cfg.seed);

  PreparedData prepared;
  prepared.input_units = full.feature_dim;
  prepared.output_units = full.target_dim;
  if (cfg.input_units >= 1 && cfg.input_units != prepared.input_units) {
    throw ConfigError("key 'model.input_units': configured " +
                      std::to_string(cfg.input_units) + " but the dataset has " +
                      std::to_string(prepared.input_units) + " features");
  }
  if (cfg.output_units >= 1 && cfg.output_units != prepared.output_units) {
    throw ConfigError("key 'model.output_units': configured " +
                      std::to_string(cfg.output_units) + " but the dataset has " +
                      std::to_string(prepared.output_units) + " target dimensions");
  }

  const FeatureScaling scaling = normalize(split.train);
  scaling.apply(split.val);
  prepared.train = std::move(split.train);
  prepared.val = std::move(split.val);

  if (!cfg.segment_y_min.empty()) {
    if (cfg.segment_y_min.size() != prepared.output_units) {
      throw ConfigError("key 'segment.y_min': needs one bound per target dimension");
    }
    prepared.bound_min = cfg.segment_y_min;
    prepared.bound_max = cfg.segment_y_max;
  } else if (cfg.source == DataSource::kSynthetic) {
    prepared.bound_min = {0.0, 0.0};
    prepared.bound_max = {cfg.network.area_length_m, cfg.network.area_width_m};
  } else {
    prepared.bound_min.assign(prepared.output_units,
                              std::numeric_limits<double>::infinity());
    prepared.bound_max.assign(prepared.output_units,
                              -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < prepared.train.rows(); ++i) {
      const auto t = prepared.train.target_row(i);
      for (std::size_t d = 0; d < prepared.output_units; ++d) {
        prepared.bound_min[d] = std::min(prepared.bound_min[d], t[d]);
        prepared.bound_max[d] = std::max(prepared.bound_max[d], t[d]);
      }
    }
  }
  return prepared;
}

std::size_t resolve_segment_count(const ExperimentConfig& cfg, const PreparedData& prepared) {
  if (cfg.segment_count.has_value()) return *cfg.segment_count;
  if (!cfg.segment_resolution.has_value()) {
    throw ConfigError("key 'segment.count': required for the fd scheme "
                      "(or provide 'segment.resolution')");
  }
  double widest = 0.0;
  for (std::size_t d = 0; d < prepared.bound_min.size(); ++d) {
    widest = std::max(widest, prepared.bound_max[d] - prepared.bound_min[d]);
  }
  const double count = std::ceil(widest / *cfg.segment_resolution);
  return std::max<std::size_t>(1, static_cast<std::size_t>(count));
}

SegmentScheme build_scheme(const ExperimentConfig& cfg, const PreparedData& prepared,
                           std::size_t segment_count) {
  if (cfg.split_strategy == SplitStrategy::kUniform) {
    return build_uniform(prepared.bound_min, prepared.bound_max, segment_count);
  }
  return build_density(prepared.train.targets, prepared.output_units, segment_count);
}

PointResult run_point(const ExperimentConfig& cfg, const PreparedData& prepared,
                      const PointSpec& spec) {
  TrainingSchedule schedule = cfg.schedule;
  schedule.lambda = spec.lambda;
  schedule.seed = cfg.seed;
  schedule.parallel_clients = cfg.parallel_clients;

  PointResult result;
  result.spec = spec;

  if (spec.scheme == Scheme::kCentralized) {
    MlpModel model;
    result.history = run_centralized(prepared.train, cfg.hidden_units, schedule, cfg.comms,
                                     prepared.val, &model);
    result.models.emplace_back(1, std::move(model));
    return result;
  }

  auto shards = partition(prepared.train, spec.clients, cfg.partition_strategy, cfg.seed);
  std::vector<ClientState> clients;
  clients.reserve(shards.size());
  for (std::size_t i = 0; i < shards.size(); ++i) {
    clients.push_back(
        make_client(static_cast<int>(i) + 1, std::move(shards[i]), cfg.hidden_units,
                    schedule));
  }

  switch (spec.scheme) {
    case Scheme::kFd: {
      const SegmentScheme scheme = build_scheme(cfg, prepared, spec.segments);
      result.history = run_fd(clients, scheme, schedule, cfg.comms, prepared.val);
      if (cfg.dump_uploads) {
        for (const ClientState& client : clients) {
          const auto rows = segment_rows(client.id, client.teacher);
          result.teacher_rows.insert(result.teacher_rows.end(), rows.begin(), rows.end());
        }
      }
      break;
    }
    case Scheme::kFl: {
      result.history = run_fl(clients, schedule, cfg.comms, prepared.val);
      break;
    }
    case Scheme::kStandalone: {
      // Independent runs merged into one history with network-wide
      // cumulative energy, so the column means the same thing everywhere.
      std::vector<std::vector<RoundReport>> histories;
      histories.reserve(clients.size());
      for (ClientState& client : clients) {
        histories.push_back(run_standalone(client, schedule, cfg.comms, prepared.val));
      }
      for (std::uint32_t round = 0; round < schedule.rounds; ++round) {
        double network_energy = 0.0;
        for (const auto& h : histories) network_energy += h[round].cum_energy_j;
        for (const auto& h : histories) {
          RoundReport row = h[round];
          row.cum_energy_j = network_energy;
          result.history.push_back(row);
        }
      }
      break;
    }
    default:
      throw ConfigError("run_point: unsupported scheme");
  }
  for (const ClientState& client : clients) {
    result.models.emplace_back(client.id, client.model);
  }
  return result;
}

RunOutcome execute_run(ExperimentConfig cfg, const RunOverrides& overrides) {
  if (overrides.seed.has_value()) cfg.seed = *overrides.seed;
  if (overrides.output_dir.has_value()) cfg.output_dir = *overrides.output_dir;
  validate(cfg);

  const PreparedData prepared = prepare_data(cfg);
  cfg.input_units = prepared.input_units;
  cfg.output_units = prepared.output_units;

  PointSpec spec;
  spec.scheme = cfg.scheme;
  spec.clients = cfg.scheme == Scheme::kCentralized ? 1 : cfg.clients;
  spec.lambda = cfg.schedule.lambda;
  spec.segments = cfg.scheme == Scheme::kFd ? resolve_segment_count(cfg, prepared) : 0;

  const PointResult result = run_point(cfg, prepared, spec);

  const fs::path dir = make_artifact_dir(cfg.output_dir, "run-" + scheme_name(cfg.scheme));
  write_text_file(dir / "config.resolved.cfg", render_config(cfg));
  write_point_artifacts(dir, result, prepared.val);
  return {dir.string()};
}

RunOutcome execute_sweep(ExperimentConfig cfg, const RunOverrides& overrides) {
  if (overrides.seed.has_value()) cfg.seed = *overrides.seed;
  if (overrides.output_dir.has_value()) cfg.output_dir = *overrides.output_dir;
  validate(cfg);
  if (cfg.sweep.empty()) {
    throw ConfigError("sweep requires at least one sweep.* axis");
  }

  const PreparedData prepared = prepare_data(cfg);
  cfg.input_units = prepared.input_units;
  cfg.output_units = prepared.output_units;

  const std::vector<Scheme> schemes =
      cfg.sweep.schemes.empty() ? std::vector<Scheme>{cfg.scheme} : cfg.sweep.schemes;
  const std::vector<std::size_t> client_counts =
      cfg.sweep.clients.empty() ? std::vector<std::size_t>{cfg.clients} : cfg.sweep.clients;
  const std::vector<double> lambdas = cfg.sweep.lambdas.empty()
                                          ? std::vector<double>{cfg.schedule.lambda}
                                          : cfg.sweep.lambdas;
  const std::vector<std::size_t> segment_counts =
      cfg.sweep.segments.empty()
          ? std::vector<std::size_t>{cfg.segment_count.has_value() ||
                                             cfg.segment_resolution.has_value()
                                         ? resolve_segment_count(cfg, prepared)
                                         : 0}
          : cfg.sweep.segments;

  const fs::path dir = make_artifact_dir(cfg.output_dir, "sweep");
  write_text_file(dir / "config.resolved.cfg", render_config(cfg));

  std::ostringstream summary;
  summary << "scheme,clients,lambda,segments,final_mae,final_rmse,total_bits\n";
  for (const Scheme scheme : schemes) {
    for (const std::size_t clients : client_counts) {
      for (const double lambda : lambdas) {
        for (const std::size_t segments : segment_counts) {
          if (scheme == Scheme::kFd && segments == 0) {
            throw ConfigError("key 'segment.count': required to sweep the fd scheme");
          }
          PointSpec spec;
          spec.scheme = scheme;
          spec.clients = scheme == Scheme::kCentralized ? 1 : clients;
          spec.lambda = lambda;
          spec.segments = scheme == Scheme::kFd ? segments : 0;

          const PointResult result = run_point(cfg, prepared, spec);
          const FinalMetrics final = final_metrics(result);
          cross_check_bits(cfg, prepared, result, final.total_bits);

          const fs::path point_dir = dir / point_dir_name(spec);
          fs::create_directories(point_dir);
          write_point_artifacts(point_dir, result, prepared.val);

          ExperimentConfig point_cfg = cfg;
          point_cfg.scheme = spec.scheme;
          point_cfg.clients = spec.clients;
          point_cfg.schedule.lambda = spec.lambda;
          if (spec.scheme == Scheme::kFd) point_cfg.segment_count = spec.segments;
          point_cfg.sweep = SweepAxes{};
          write_text_file(point_dir / "config.resolved.cfg", render_config(point_cfg));

          summary << scheme_name(spec.scheme) << ',' << spec.clients << ','
                  << format_double(spec.lambda) << ',' << spec.segments << ','
                  << format_double(final.mae) << ',' << format_double(final.rmse) << ','
                  << final.total_bits << '\n';
        }
      }
    }
  }
  write_text_file(dir / "summary.csv", summary.str());
  return {dir.string()};
}

RunOutcome generate_data_dump(ExperimentConfig cfg, const RunOverrides& overrides) {
  if (overrides.seed.has_value()) cfg.seed = *overrides.seed;
  if (overrides.output_dir.has_value()) cfg.output_dir = *overrides.output_dir;
  validate(cfg);
  if (cfg.source != DataSource::kSynthetic) {
    throw ConfigError("gen-data requires data.source = synthetic");
  }
  const RssiNetworkConfig net = resolved_network(cfg);
  const FingerprintDataset dataset = generate_fingerprints(net);

  const fs::path dir = make_artifact_dir(cfg.output_dir, "data");
  write_dataset_csv(dataset, (dir / "dataset.csv").string());
  write_dataset_metadata(net, dataset.rows(), (dir / "dataset.meta").string());
  write_text_file(dir / "config.resolved.cfg", render_config(cfg));
  return {dir.string()};
}

}  // namespace fdreg
