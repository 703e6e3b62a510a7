#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "core/errors.hpp"
#include "doctest.h"

using namespace fdreg;

namespace {

std::filesystem::path tmp_file(const std::string& name) {
  const std::filesystem::path dir = FDREG_TEST_TMP_DIR;
  std::filesystem::create_directories(dir);
  return dir / name;
}

RssiNetworkConfig small_network() {
  RssiNetworkConfig cfg;
  cfg.ap_count = 4;
  cfg.rp_count = 9;
  cfg.repetitions = 3;
  cfg.seed = 200;
  return cfg;
}

// every row as a sortable tuple, for multiset comparison
std::multiset<std::vector<double>> row_multiset(const FingerprintDataset& ds) {
  std::multiset<std::vector<double>> rows;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    std::vector<double> row(ds.feature_row(i).begin(), ds.feature_row(i).end());
    row.insert(row.end(), ds.target_row(i).begin(), ds.target_row(i).end());
    rows.insert(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("free-space reference loss at 1 m / 2.4 GHz") {
  const double pl0 = reference_path_loss_db(1.0, 2.4e9);
  // independent route: 10 * log10((4 pi d0 f / c)^2)
  const double oracle =
      10.0 * std::log10(std::pow(4.0 * 3.14159265358979323846 * 1.0 * 2.4e9 / kSpeedOfLight,
                                 2.0));
  CHECK(pl0 == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(std::abs(pl0 - 40.05) <= 0.01);

  RssiNetworkConfig cfg;
  cfg.shadowing_sigma_db = 0.0;
  const double rssi = cfg.tx_power_dbm - path_loss_db(cfg, 1.0, 0.0);
  CHECK(rssi == doctest::Approx(-20.05).epsilon(1e-3));
}

TEST_CASE("doubling the distance raises the loss by 10 * beta * log10(2)") {
  RssiNetworkConfig cfg;
  const double step = path_loss_db(cfg, 2.0, 0.0) - path_loss_db(cfg, 1.0, 0.0);
  CHECK(step == doctest::Approx(10.0 * 3.23 * std::log10(2.0)).epsilon(1e-12));
  CHECK(step == doctest::Approx(9.72).epsilon(1e-3));
}

TEST_CASE("noiseless path loss is strictly monotone beyond the reference distance") {
  RssiNetworkConfig cfg;
  double previous = path_loss_db(cfg, 1.0, 0.0);
  for (double d = 1.5; d < 60.0; d += 0.5) {
    const double current = path_loss_db(cfg, d, 0.0);
    CHECK(current > previous);
    previous = current;
  }
  // sub-reference distances clamp to d0
  CHECK(path_loss_db(cfg, 0.01, 0.0) == path_loss_db(cfg, 1.0, 0.0));
}

TEST_CASE("generator is seed-deterministic and shaped by the config") {
  const RssiNetworkConfig cfg = small_network();
  const FingerprintDataset a = generate_fingerprints(cfg);
  const FingerprintDataset b = generate_fingerprints(cfg);
  CHECK(a.features == b.features);
  CHECK(a.targets == b.targets);
  CHECK(a.rows() == cfg.rp_count * cfg.repetitions);
  CHECK(a.feature_dim == cfg.ap_count);
  CHECK(a.target_dim == 2);
  CHECK(a.rp_positions.size() == cfg.rp_count);
  CHECK(a.ap_positions.size() == cfg.ap_count);

  RssiNetworkConfig other = cfg;
  other.seed = 201;
  const FingerprintDataset c = generate_fingerprints(other);
  CHECK(a.features != c.features);

  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (const double v : a.feature_row(i)) {
      CHECK(v <= cfg.tx_power_dbm);
      const bool in_range = v >= cfg.sensitivity_floor_dbm || v == kNotDetectedRssi;
      CHECK(in_range);
    }
    CHECK(a.target_row(i)[0] >= 0.0);
    CHECK(a.target_row(i)[0] <= cfg.area_length_m);
    CHECK(a.target_row(i)[1] >= 0.0);
    CHECK(a.target_row(i)[1] <= cfg.area_width_m);
  }
}

TEST_CASE("generator rejects degenerate configs") {
  RssiNetworkConfig cfg = small_network();
  cfg.area_length_m = 0.0;
  CHECK_THROWS_AS(generate_fingerprints(cfg), ConfigError);
  cfg = small_network();
  cfg.ap_count = 0;
  CHECK_THROWS_AS(generate_fingerprints(cfg), ConfigError);
}

TEST_CASE("partition: single shard is the dataset itself") {
  const FingerprintDataset ds = generate_fingerprints(small_network());
  const auto shards = partition(ds, 1, PartitionStrategy::kRandom, 1);
  REQUIRE(shards.size() == 1);
  CHECK(shards[0].features == ds.features);
  CHECK(shards[0].targets == ds.targets);
}

TEST_CASE("partition: random shards are equal-sized, disjoint, and cover the data") {
  const FingerprintDataset ds = generate_fingerprints(small_network());  // 27 rows
  const auto shards = partition(ds, 5, PartitionStrategy::kRandom, 99);
  REQUIRE(shards.size() == 5);
  std::size_t total = 0;
  std::multiset<std::vector<double>> merged;
  for (const auto& shard : shards) {
    CHECK(shard.rows() >= 5);
    CHECK(shard.rows() <= 6);
    total += shard.rows();
    const auto rows = row_multiset(shard);
    merged.insert(rows.begin(), rows.end());
  }
  CHECK(total == ds.rows());
  CHECK(merged == row_multiset(ds));
}

TEST_CASE("partition: exact equal split when divisible") {
  RssiNetworkConfig cfg = small_network();
  cfg.rp_count = 100;
  cfg.repetitions = 10;
  const FingerprintDataset ds = generate_fingerprints(cfg);
  const auto shards = partition(ds, 5, PartitionStrategy::kRandom, 7);
  for (const auto& shard : shards) CHECK(shard.rows() == 200);
}

TEST_CASE("partition: spatial stripes are ordered along the first coordinate") {
  const FingerprintDataset ds = generate_fingerprints(small_network());
  const auto shards = partition(ds, 2, PartitionStrategy::kSpatial, 5);
  double left_max = -1e300;
  double right_min = 1e300;
  for (std::size_t i = 0; i < shards[0].rows(); ++i) {
    left_max = std::max(left_max, shards[0].target_row(i)[0]);
  }
  for (std::size_t i = 0; i < shards[1].rows(); ++i) {
    right_min = std::min(right_min, shards[1].target_row(i)[0]);
  }
  CHECK(left_max <= right_min);
}

TEST_CASE("partition rejects more clients than samples") {
  const FingerprintDataset ds = generate_fingerprints(small_network());
  CHECK_THROWS_AS(partition(ds, ds.rows() + 1, PartitionStrategy::kRandom, 0), ConfigError);
  CHECK_THROWS_AS(partition(ds, 0, PartitionStrategy::kRandom, 0), ConfigError);
}

TEST_CASE("normalize: identity on features already in the unit interval") {
  FingerprintDataset ds;
  ds.feature_dim = 2;
  ds.target_dim = 1;
  ds.features = {0.0, 1.0, 1.0, 0.0, 0.5, 0.25};
  ds.targets = {1.0, 2.0, 3.0};
  const FingerprintDataset before = ds;
  normalize(ds);
  CHECK(ds.features == before.features);
  CHECK(ds.targets == before.targets);
}

TEST_CASE("normalize: constant columns collapse to zero, targets stay in meters") {
  FingerprintDataset ds;
  ds.feature_dim = 1;
  ds.target_dim = 1;
  ds.features = {7.5, 7.5, 7.5};
  ds.targets = {10.0, 20.0, 30.0};
  normalize(ds);
  CHECK(ds.features == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(ds.targets == std::vector<double>{10.0, 20.0, 30.0});
}

TEST_CASE("normalize maps sentinels to zero and scales the rest to [0,1]") {
  FingerprintDataset ds;
  ds.feature_dim = 1;
  ds.target_dim = 1;
  ds.features = {-90.0, -50.0, kNotDetectedRssi, -70.0};
  ds.targets = {0.0, 0.0, 0.0, 0.0};
  normalize(ds);
  CHECK(ds.features[0] == 0.0);
  CHECK(ds.features[1] == 1.0);
  CHECK(ds.features[2] == 0.0);
  CHECK(ds.features[3] == 0.5);
}

TEST_CASE("feature scaling round-trips on sentinel-free data") {
  FingerprintDataset ds = generate_fingerprints(small_network());
  // keep only in-range readings for the invertibility check
  for (double& v : ds.features) {
    if (v == kNotDetectedRssi) v = -99.0;
  }
  const FingerprintDataset original = ds;
  const FeatureScaling scaling = normalize(ds);
  scaling.invert(ds);
  for (std::size_t i = 0; i < ds.features.size(); ++i) {
    CHECK(ds.features[i] == doctest::Approx(original.features[i]).epsilon(1e-12));
  }
}

TEST_CASE("per-reference holdout keeps one repetition per point") {
  const RssiNetworkConfig cfg = small_network();
  const FingerprintDataset ds = generate_fingerprints(cfg);
  const TrainValSplit split = split_last_repetition(ds, cfg.repetitions);
  CHECK(split.val.rows() == cfg.rp_count);
  CHECK(split.train.rows() == cfg.rp_count * (cfg.repetitions - 1));
  // every reference position appears exactly once in the validation set
  std::set<std::pair<double, double>> positions;
  for (std::size_t i = 0; i < split.val.rows(); ++i) {
    positions.insert({split.val.target_row(i)[0], split.val.target_row(i)[1]});
  }
  CHECK(positions.size() == cfg.rp_count);
  CHECK_THROWS_AS(split_last_repetition(ds, 1), ConfigError);
  CHECK_THROWS_AS(split_last_repetition(ds, 4), ConfigError);  // 27 % 4 != 0
}

TEST_CASE("fraction holdout splits deterministically") {
  const FingerprintDataset ds = generate_fingerprints(small_network());
  const TrainValSplit a = split_fraction(ds, 0.25, 31);
  const TrainValSplit b = split_fraction(ds, 0.25, 31);
  CHECK(a.val.rows() == 7);  // round(0.25 * 27)
  CHECK(a.train.rows() + a.val.rows() == ds.rows());
  CHECK(a.val.features == b.val.features);
  CHECK_THROWS_AS(split_fraction(ds, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(split_fraction(ds, 1.0, 1), ConfigError);
}

TEST_CASE("load_csv parses features, targets, and the sentinel convention") {
  const auto path = tmp_file("hand.csv");
  {
    std::ofstream out(path);
    out << "id,rssi_0,rssi_1,x,y\n";
    out << "1,-40.5,100,1.0,2.0\n";
    out << "2,-60.25,-70,3.0,4.0\n";
    out << "3,100,-80,5.0,6.0\n";
  }
  CsvSchema schema;
  schema.feature_columns = {"rssi_0", "rssi_1"};
  schema.target_columns = {"x", "y"};
  schema.not_detected_sentinel = 100.0;
  const FingerprintDataset ds = load_csv(path.string(), schema);
  REQUIRE(ds.rows() == 3);
  REQUIRE(ds.feature_dim == 2);
  CHECK(ds.features[0] == -40.5);
  CHECK(ds.features[1] == kNotDetectedRssi);
  CHECK(ds.features[4] == kNotDetectedRssi);
  CHECK(ds.targets == std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
}

TEST_CASE("load_csv supports prefix patterns") {
  const auto path = tmp_file("prefix.csv");
  {
    std::ofstream out(path);
    out << "wap001,wap002,other,x,y\n";
    out << "-10,-20,99,0.5,0.25\n";
  }
  CsvSchema schema;
  schema.feature_columns = {"wap*"};
  schema.target_columns = {"x", "y"};
  const FingerprintDataset ds = load_csv(path.string(), schema);
  CHECK(ds.feature_dim == 2);
  CHECK(ds.features == std::vector<double>{-10.0, -20.0});
}

TEST_CASE("load_csv: header-only files give an empty dataset") {
  const auto path = tmp_file("empty.csv");
  {
    std::ofstream out(path);
    out << "rssi_0,x,y\n";
  }
  CsvSchema schema;
  schema.feature_columns = {"rssi_0"};
  schema.target_columns = {"x", "y"};
  const FingerprintDataset ds = load_csv(path.string(), schema);
  CHECK(ds.rows() == 0);
}

TEST_CASE("load_csv errors name the problem") {
  const auto path = tmp_file("broken.csv");
  {
    std::ofstream out(path);
    out << "rssi_0,x,y\n";
    out << "-10,0.5,oops\n";
  }
  CsvSchema schema;
  schema.feature_columns = {"rssi_0"};
  schema.target_columns = {"x", "y"};
  try {
    load_csv(path.string(), schema);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    const std::string message = e.what();
    CHECK(message.find("oops") != std::string::npos);
    CHECK(message.find(":2") != std::string::npos);  // offending file line
  }

  CsvSchema missing;
  missing.feature_columns = {"rssi_9"};
  missing.target_columns = {"x", "y"};
  CHECK_THROWS_AS(load_csv(path.string(), missing), ParseError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", schema), IoError);
}

TEST_CASE("generator dump reloads exactly") {
  const RssiNetworkConfig cfg = small_network();
  const FingerprintDataset ds = generate_fingerprints(cfg);
  const auto path = tmp_file("dump.csv");
  write_dataset_csv(ds, path.string());
  write_dataset_metadata(cfg, ds.rows(), tmp_file("dump.meta").string());

  CsvSchema schema;
  schema.feature_columns = {"rssi_*"};
  schema.target_columns = {"x", "y"};
  schema.not_detected_sentinel = kNotDetectedRssi;
  const FingerprintDataset reloaded = load_csv(path.string(), schema);
  CHECK(reloaded.features == ds.features);
  CHECK(reloaded.targets == ds.targets);
}
