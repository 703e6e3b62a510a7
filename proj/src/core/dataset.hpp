#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fdreg {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Internal marker for an access point that was out of range. Must stay
// below any physically possible RSSI reading.
inline constexpr double kNotDetectedRssi = -200.0;

// Log-distance path-loss simulation of a rectangular indoor area with
// randomly placed access points and grid-placed reference points.
struct RssiNetworkConfig {
  double area_length_m = 20.0;
  double area_width_m = 20.0;
  std::size_t ap_count = 10;
  std::size_t rp_count = 100;
  std::size_t repetitions = 10;
  double path_loss_exponent = 3.23;
  double shadowing_sigma_db = 2.0;
  double frequency_hz = 2.4e9;
  double tx_power_dbm = 20.0;
  double reference_distance_m = 1.0;
  double sensitivity_floor_dbm = -100.0;
  std::uint64_t seed = 200;
};

// Free-space path loss at the reference distance, in dB.
double reference_path_loss_db(double reference_distance_m, double frequency_hz);

// Full path loss at `distance_m` (clamped to the reference distance), in dB.
double path_loss_db(const RssiNetworkConfig& config, double distance_m,
                    double shadowing_db);

struct FingerprintDataset {
  std::size_t feature_dim = 0;
  std::size_t target_dim = 0;
  std::vector<double> features;  // rows x feature_dim, row-major
  std::vector<double> targets;   // rows x target_dim, row-major
  std::vector<std::array<double, 2>> ap_positions;  // synthetic only
  std::vector<std::array<double, 2>> rp_positions;  // synthetic only

  std::size_t rows() const { return feature_dim == 0 ? 0 : features.size() / feature_dim; }
  std::span<const double> feature_row(std::size_t i) const {
    return {features.data() + i * feature_dim, feature_dim};
  }
  std::span<const double> target_row(std::size_t i) const {
    return {targets.data() + i * target_dim, target_dim};
  }
  void append_row_from(const FingerprintDataset& source, std::size_t row);
};

// Rows are reference-point major: row = rp_index * repetitions + repetition.
// Fully determined by config.seed.
FingerprintDataset generate_fingerprints(const RssiNetworkConfig& config);

struct CsvSchema {
  // Column names; a trailing '*' matches every header column with that
  // prefix, in header order.
  std::vector<std::string> feature_columns;
  std::vector<std::string> target_columns;
  double not_detected_sentinel = kNotDetectedRssi;
};

FingerprintDataset load_csv(const std::string& path, const CsvSchema& schema);

enum class PartitionStrategy { kRandom, kSpatial };

// Disjoint shards covering the dataset. Random: seeded shuffle then
// equal-size chunks (sizes differ by at most one). Spatial: contiguous
// stripes after sorting by the first target coordinate.
std::vector<FingerprintDataset> partition(const FingerprintDataset& dataset, std::size_t k,
                                          PartitionStrategy strategy, std::uint64_t seed);

// Per-column affine feature map fitted on non-sentinel entries. apply()
// sends each value to (x - offset) * scale and every sentinel entry to 0;
// invert() assumes no sentinels were present.
struct FeatureScaling {
  std::vector<double> offset;
  std::vector<double> scale;

  void apply(FingerprintDataset& dataset) const;
  void invert(FingerprintDataset& dataset) const;
};

FeatureScaling fit_feature_scaling(const FingerprintDataset& dataset);

// Fit on `dataset` and scale it in place; apply the returned record to
// validation data so both see the same map.
FeatureScaling normalize(FingerprintDataset& dataset);

struct TrainValSplit {
  FingerprintDataset train;
  FingerprintDataset val;
};

// Reserve the last repetition of every reference point for validation.
// Requires the generator's rp-major row layout.
TrainValSplit split_last_repetition(const FingerprintDataset& dataset,
                                    std::size_t repetitions);

// Seeded shuffle, then hold out round(fraction * rows) samples (at least 1).
TrainValSplit split_fraction(const FingerprintDataset& dataset, double val_fraction,
                             std::uint64_t seed);

// Generator dump: rssi_0..rssi_{M-1} feature columns plus the target
// columns (x,y for 2-D targets), values exact on reload.
void write_dataset_csv(const FingerprintDataset& dataset, const std::string& path);
void write_dataset_metadata(const RssiNetworkConfig& config, std::size_t rows,
                            const std::string& path);

}  // namespace fdreg
