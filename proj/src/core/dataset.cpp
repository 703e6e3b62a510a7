#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fdreg {

namespace {

void check_network_config(const RssiNetworkConfig& c) {
  if (c.area_length_m <= 0.0 || c.area_width_m <= 0.0) {
    throw ConfigError("network area must have positive extent");
  }
  if (c.ap_count < 1 || c.rp_count < 1 || c.repetitions < 1) {
    throw ConfigError("ap_count, rp_count and repetitions must be at least 1");
  }
  if (c.path_loss_exponent <= 0.0) throw ConfigError("path loss exponent must be positive");
  if (c.shadowing_sigma_db < 0.0) throw ConfigError("shadowing sigma must be nonnegative");
  if (c.reference_distance_m <= 0.0) throw ConfigError("reference distance must be positive");
  if (c.frequency_hz <= 0.0) throw ConfigError("frequency must be positive");
}

// Nearest rectangular grid holding exactly n points: the largest divisor
// of n that is <= sqrt(n) becomes the row count.
std::pair<std::size_t, std::size_t> grid_shape(std::size_t n) {
  std::size_t rows = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  while (rows > 1 && n % rows != 0) --rows;
  return {rows, n / rows};
}

FingerprintDataset empty_like(const FingerprintDataset& source) {
  FingerprintDataset out;
  out.feature_dim = source.feature_dim;
  out.target_dim = source.target_dim;
  return out;
}

std::vector<FingerprintDataset> chunk_by_indices(const FingerprintDataset& dataset,
                                                 const std::vector<std::size_t>& order,
                                                 std::size_t k) {
  const std::size_t n = order.size();
  std::vector<FingerprintDataset> shards;
  shards.reserve(k);
  std::size_t cursor = 0;
  for (std::size_t shard = 0; shard < k; ++shard) {
    const std::size_t size = n / k + (shard < n % k ? 1 : 0);
    FingerprintDataset piece = empty_like(dataset);
    for (std::size_t i = 0; i < size; ++i) piece.append_row_from(dataset, order[cursor++]);
    shards.push_back(std::move(piece));
  }
  return shards;
}

}  // namespace

void FingerprintDataset::append_row_from(const FingerprintDataset& source, std::size_t row) {
  const auto f = source.feature_row(row);
  const auto t = source.target_row(row);
  features.insert(features.end(), f.begin(), f.end());
  targets.insert(targets.end(), t.begin(), t.end());
}

double reference_path_loss_db(double reference_distance_m, double frequency_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * reference_distance_m / kSpeedOfLight) +
         20.0 * std::log10(frequency_hz);
}

double path_loss_db(const RssiNetworkConfig& config, double distance_m,
                    double shadowing_db) {
  const double d0 = config.reference_distance_m;
  const double d = std::max(distance_m, d0);
  return reference_path_loss_db(d0, config.frequency_hz) +
         10.0 * config.path_loss_exponent * std::log10(d / d0) + shadowing_db;
}

FingerprintDataset generate_fingerprints(const RssiNetworkConfig& config) {
  check_network_config(config);

  FingerprintDataset dataset;
  dataset.feature_dim = config.ap_count;
  dataset.target_dim = 2;

  Rng placement(mix_seed(config.seed, kStreamApPlacement));
  dataset.ap_positions.reserve(config.ap_count);
  for (std::size_t m = 0; m < config.ap_count; ++m) {
    dataset.ap_positions.push_back({placement.uniform(0.0, config.area_length_m),
                                    placement.uniform(0.0, config.area_width_m)});
  }

  const auto [grid_rows, grid_cols] = grid_shape(config.rp_count);
  dataset.rp_positions.reserve(config.rp_count);
  for (std::size_t r = 0; r < grid_rows; ++r) {
    for (std::size_t c = 0; c < grid_cols; ++c) {
      dataset.rp_positions.push_back(
          {(static_cast<double>(c) + 0.5) * config.area_length_m / static_cast<double>(grid_cols),
           (static_cast<double>(r) + 0.5) * config.area_width_m / static_cast<double>(grid_rows)});
    }
  }

  Rng shadowing(mix_seed(config.seed, kStreamShadowing));
  const std::size_t rows = config.rp_count * config.repetitions;
  dataset.features.reserve(rows * config.ap_count);
  dataset.targets.reserve(rows * 2);
  for (std::size_t n = 0; n < config.rp_count; ++n) {
    const auto& rp = dataset.rp_positions[n];
    for (std::size_t t = 0; t < config.repetitions; ++t) {
      for (std::size_t m = 0; m < config.ap_count; ++m) {
        const auto& ap = dataset.ap_positions[m];
        const double distance = std::hypot(rp[0] - ap[0], rp[1] - ap[1]);
        const double shadow = shadowing.normal(0.0, config.shadowing_sigma_db);
        double rssi = config.tx_power_dbm - path_loss_db(config, distance, shadow);
        if (rssi > config.tx_power_dbm) rssi = config.tx_power_dbm;
        dataset.features.push_back(rssi < config.sensitivity_floor_dbm ? kNotDetectedRssi
                                                                       : rssi);
      }
      dataset.targets.push_back(rp[0]);
      dataset.targets.push_back(rp[1]);
    }
  }
  return dataset;
}

FingerprintDataset load_csv(const std::string& path, const CsvSchema& schema) {
  if (schema.feature_columns.empty() || schema.target_columns.empty()) {
    throw ConfigError("csv schema needs feature and target columns");
  }
  const CsvTable table = read_csv_file(path);

  std::vector<std::size_t> feature_cols;
  for (const std::string& pattern : schema.feature_columns) {
    if (!pattern.empty() && pattern.back() == '*') {
      const std::string prefix = pattern.substr(0, pattern.size() - 1);
      bool matched = false;
      for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i].rfind(prefix, 0) == 0) {
          feature_cols.push_back(i);
          matched = true;
        }
      }
      if (!matched) {
        throw ParseError(path + ": no header column matches pattern '" + pattern + "'");
      }
    } else {
      const int idx = table.column(pattern);
      if (idx < 0) throw ParseError(path + ": missing feature column '" + pattern + "'");
      feature_cols.push_back(static_cast<std::size_t>(idx));
    }
  }
  std::vector<std::size_t> target_cols;
  for (const std::string& name : schema.target_columns) {
    const int idx = table.column(name);
    if (idx < 0) throw ParseError(path + ": missing target column '" + name + "'");
    target_cols.push_back(static_cast<std::size_t>(idx));
  }

  FingerprintDataset dataset;
  dataset.feature_dim = feature_cols.size();
  dataset.target_dim = target_cols.size();
  dataset.features.reserve(table.rows.size() * feature_cols.size());
  dataset.targets.reserve(table.rows.size() * target_cols.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    for (const std::size_t c : feature_cols) {
      const double value = parse_double_cell(cells[c], table.header[c], r + 2, path);
      dataset.features.push_back(value == schema.not_detected_sentinel ? kNotDetectedRssi
                                                                       : value);
    }
    for (const std::size_t c : target_cols) {
      dataset.targets.push_back(parse_double_cell(cells[c], table.header[c], r + 2, path));
    }
  }
  return dataset;
}

std::vector<FingerprintDataset> partition(const FingerprintDataset& dataset, std::size_t k,
                                          PartitionStrategy strategy, std::uint64_t seed) {
  if (k < 1) throw ConfigError("partition needs at least one shard");
  if (dataset.rows() == 0) throw ConfigError("partition needs a non-empty dataset");
  if (k > dataset.rows()) {
    throw ConfigError("cannot split " + std::to_string(dataset.rows()) + " samples across " +
                      std::to_string(k) + " clients");
  }
  if (k == 1) return {dataset};

  std::vector<std::size_t> order(dataset.rows());
  std::iota(order.begin(), order.end(), 0);
  if (strategy == PartitionStrategy::kRandom) {
    Rng rng(mix_seed(seed, kStreamPartition));
    rng.shuffle(order);
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dataset.targets[a * dataset.target_dim] < dataset.targets[b * dataset.target_dim];
    });
  }
  return chunk_by_indices(dataset, order, k);
}

FeatureScaling fit_feature_scaling(const FingerprintDataset& dataset) {
  if (dataset.rows() == 0) throw ConfigError("cannot fit feature scaling on an empty dataset");
  const std::size_t cols = dataset.feature_dim;
  FeatureScaling scaling;
  scaling.offset.assign(cols, 0.0);
  scaling.scale.assign(cols, 1.0);
  for (std::size_t c = 0; c < cols; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < dataset.rows(); ++r) {
      const double v = dataset.features[r * cols + c];
      if (v == kNotDetectedRssi) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo < hi)) {
      // constant (or all-sentinel) column: offset only
      scaling.offset[c] = std::isfinite(lo) ? lo : 0.0;
      scaling.scale[c] = 1.0;
    } else {
      scaling.offset[c] = lo;
      scaling.scale[c] = 1.0 / (hi - lo);
    }
  }
  return scaling;
}

void FeatureScaling::apply(FingerprintDataset& dataset) const {
  if (dataset.feature_dim != offset.size()) {
    throw ConfigError("feature scaling was fitted for a different feature count");
  }
  const std::size_t cols = dataset.feature_dim;
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double& v = dataset.features[r * cols + c];
      v = (v == kNotDetectedRssi) ? 0.0 : (v - offset[c]) * scale[c];
    }
  }
}

void FeatureScaling::invert(FingerprintDataset& dataset) const {
  if (dataset.feature_dim != offset.size()) {
    throw ConfigError("feature scaling was fitted for a different feature count");
  }
  const std::size_t cols = dataset.feature_dim;
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double& v = dataset.features[r * cols + c];
      v = v / scale[c] + offset[c];
    }
  }
}

FeatureScaling normalize(FingerprintDataset& dataset) {
  FeatureScaling scaling = fit_feature_scaling(dataset);
  scaling.apply(dataset);
  return scaling;
}

TrainValSplit split_last_repetition(const FingerprintDataset& dataset,
                                    std::size_t repetitions) {
  if (repetitions < 2) {
    throw ConfigError("per-reference holdout needs at least 2 repetitions");
  }
  if (dataset.rows() % repetitions != 0) {
    throw ConfigError("row count is not a multiple of the repetition count");
  }
  TrainValSplit split{empty_like(dataset), empty_like(dataset)};
  for (std::size_t row = 0; row < dataset.rows(); ++row) {
    if (row % repetitions == repetitions - 1) {
      split.val.append_row_from(dataset, row);
    } else {
      split.train.append_row_from(dataset, row);
    }
  }
  return split;
}

TrainValSplit split_fraction(const FingerprintDataset& dataset, double val_fraction,
                             std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.rows();
  if (n < 2) throw ConfigError("fraction holdout needs at least 2 samples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, kStreamValidation));
  rng.shuffle(order);
  std::size_t val_count = static_cast<std::size_t>(
      std::llround(val_fraction * static_cast<double>(n)));
  val_count = std::clamp<std::size_t>(val_count, 1, n - 1);
  TrainValSplit split{empty_like(dataset), empty_like(dataset)};
  for (std::size_t i = 0; i < n; ++i) {
    if (i < val_count) {
      split.val.append_row_from(dataset, order[i]);
    } else {
      split.train.append_row_from(dataset, order[i]);
    }
  }
  return split;
}

void write_dataset_csv(const FingerprintDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < dataset.feature_dim; ++c) {
    out << "rssi_" << c << ',';
  }
  if (dataset.target_dim == 1) {
    out << "y\n";
  } else if (dataset.target_dim == 2) {
    out << "x,y\n";
  } else {
    for (std::size_t d = 0; d < dataset.target_dim; ++d) {
      out << 'y' << d << (d + 1 == dataset.target_dim ? '\n' : ',');
    }
  }
  for (std::size_t r = 0; r < dataset.rows(); ++r) {
    for (std::size_t c = 0; c < dataset.feature_dim; ++c) {
      out << format_double(dataset.features[r * dataset.feature_dim + c]) << ',';
    }
    for (std::size_t d = 0; d < dataset.target_dim; ++d) {
      out << format_double(dataset.targets[r * dataset.target_dim + d]);
      out << (d + 1 == dataset.target_dim ? '\n' : ',');
    }
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_dataset_metadata(const RssiNetworkConfig& config, std::size_t rows,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "area_length_m=" << format_double(config.area_length_m) << '\n'
      << "area_width_m=" << format_double(config.area_width_m) << '\n'
      << "ap_count=" << config.ap_count << '\n'
      << "rp_count=" << config.rp_count << '\n'
      << "repetitions=" << config.repetitions << '\n'
      << "path_loss_exponent=" << format_double(config.path_loss_exponent) << '\n'
      << "shadowing_sigma_db=" << format_double(config.shadowing_sigma_db) << '\n'
      << "frequency_hz=" << format_double(config.frequency_hz) << '\n'
      << "tx_power_dbm=" << format_double(config.tx_power_dbm) << '\n'
      << "reference_distance_m=" << format_double(config.reference_distance_m) << '\n'
      << "sensitivity_floor_dbm=" << format_double(config.sensitivity_floor_dbm) << '\n'
      << "seed=" << config.seed << '\n'
      << "not_detected_value=" << format_double(kNotDetectedRssi) << '\n'
      << "rows=" << rows << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace fdreg
