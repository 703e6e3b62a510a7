#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/comms.hpp"
#include "core/dataset.hpp"
#include "core/protocol.hpp"
#include "core/segmentation.hpp"

namespace fdreg {

enum class Scheme { kFd, kFl, kStandalone, kCentralized };

std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);

enum class DataSource { kSynthetic, kCsv };
enum class ValidationSplit { kPerReference, kFraction };

struct SweepAxes {
  std::vector<Scheme> schemes;
  std::vector<std::size_t> clients;
  std::vector<double> lambdas;
  std::vector<std::size_t> segments;

  bool empty() const {
    return schemes.empty() && clients.empty() && lambdas.empty() && segments.empty();
  }
};

// One experiment document: data source, model, schedule, segmentation,
// comms accounting and optional sweep axes. Parsed from `key = value`
// lines with dotted section keys.
struct ExperimentConfig {
  Scheme scheme = Scheme::kFd;
  std::size_t clients = 5;
  std::uint64_t seed = 200;
  std::string output_dir = "runs";
  bool dump_uploads = false;
  bool parallel_clients = true;

  DataSource source = DataSource::kSynthetic;
  RssiNetworkConfig network;
  bool network_seed_set = false;  // else derived from `seed`
  std::string csv_path;
  CsvSchema csv_schema;
  PartitionStrategy partition_strategy = PartitionStrategy::kRandom;
  ValidationSplit validation = ValidationSplit::kPerReference;
  double validation_fraction = 0.1;

  std::size_t input_units = 0;   // 0 = derive from the data
  std::size_t hidden_units = 1000;
  std::size_t output_units = 0;  // 0 = derive from the data

  TrainingSchedule schedule;

  std::optional<std::size_t> segment_count;
  std::optional<double> segment_resolution;  // alternative to a fixed count
  SplitStrategy split_strategy = SplitStrategy::kUniform;
  std::vector<double> segment_y_min;  // optional explicit bounds
  std::vector<double> segment_y_max;

  CommsConfig comms;
  SweepAxes sweep;
};

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

// Structural validation; throws ConfigError naming the offending key.
void validate(const ExperimentConfig& config);

// Resolved snapshot: every applicable key written explicitly. The result
// parses back into an equivalent configuration.
std::string render_config(const ExperimentConfig& config);

}  // namespace fdreg
