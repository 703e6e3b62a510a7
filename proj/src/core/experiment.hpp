#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/protocol.hpp"

namespace fdreg {

struct RunOverrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
};

struct RunOutcome {
  std::string artifact_dir;
};

// Dataset pipeline shared by every run of one configuration: build or load,
// hold out validation, fit the feature scaling on the training rows and
// apply it to both, resolve model dimensions and segment bounds.
struct PreparedData {
  FingerprintDataset train;
  FingerprintDataset val;
  std::size_t input_units = 0;
  std::size_t output_units = 0;
  std::vector<double> bound_min;  // segment bounds per target dimension
  std::vector<double> bound_max;
};

PreparedData prepare_data(const ExperimentConfig& config);

// Segment count from the config: explicit count, or the resolution mapped
// through the target extent (the widest dimension decides).
std::size_t resolve_segment_count(const ExperimentConfig& config,
                                  const PreparedData& prepared);

SegmentScheme build_scheme(const ExperimentConfig& config, const PreparedData& prepared,
                           std::size_t segment_count);

// One grid point of an experiment: a scheme variant at a client count,
// distillation weight and segment count.
struct PointSpec {
  Scheme scheme = Scheme::kFd;
  std::size_t clients = 0;
  double lambda = 0.0;
  std::size_t segments = 0;
};

struct PointResult {
  PointSpec spec;
  std::vector<RoundReport> history;
  std::vector<std::pair<int, MlpModel>> models;  // client id -> final model
  std::vector<SegmentCsvRow> teacher_rows;       // filled when dumping uploads
};

PointResult run_point(const ExperimentConfig& config, const PreparedData& prepared,
                      const PointSpec& spec);

// Full CLI-facing entry points; artifacts land in a fresh timestamped
// directory under the configured output directory.
RunOutcome execute_run(ExperimentConfig config, const RunOverrides& overrides = {});
RunOutcome execute_sweep(ExperimentConfig config, const RunOverrides& overrides = {});
RunOutcome generate_data_dump(ExperimentConfig config, const RunOverrides& overrides = {});

}  // namespace fdreg
