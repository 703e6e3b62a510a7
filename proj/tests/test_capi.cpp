// Exercises the shared-library surface the CLI uses.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fdreg.h"

namespace {

namespace fs = std::filesystem;

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(FDREG_TEST_TMP_DIR) / name;
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const std::string& name, const std::string& content) {
  const fs::path path = tmp_dir("capi") / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const char* kTinyConfig =
    "scheme = fd\n"
    "clients = 2\n"
    "seed = 7\n"
    "data.source = synthetic\n"
    "data.ap_count = 5\n"
    "data.rp_count = 16\n"
    "data.repetitions = 3\n"
    "model.hidden_units = 16\n"
    "train.rounds = 3\n"
    "train.batch_size = 8\n"
    "segment.count = 4\n";

}  // namespace

TEST_CASE("version and status names are stable strings") {
  CHECK(fdreg_version() != nullptr);
  CHECK(std::string(fdreg_status_name(FDREG_OK)) == "ok");
  CHECK(std::string(fdreg_status_name(FDREG_ERR_CONFIG)) == "configuration error");
}

TEST_CASE("bit accounting through the C surface") {
  CHECK(fdreg_fd_bits_per_client_round(10, 2, 32) == 640);
  CHECK(fdreg_fl_bits_per_client_round(10, 1000, 2, 32) == 416064);
  CHECK(fdreg_fd_bits_per_client_round(0, 2, 32) == 0);  // invalid -> 0 + error message
  CHECK(std::string(fdreg_last_error()).size() > 0);
  CHECK(fdreg_shannon_max_bits(1, 1, 1.0, 3.0) == 2.0);
}

TEST_CASE("open failures map to statuses with messages") {
  fdreg_run* run = nullptr;
  CHECK(fdreg_run_open("/nonexistent/config.cfg", &run) == FDREG_ERR_IO);
  CHECK(run == nullptr);
  CHECK(std::string(fdreg_last_error()).find("nonexistent") != std::string::npos);

  const std::string bad = write_config("bad.cfg", "clients = 2\n");
  CHECK(fdreg_run_open(bad.c_str(), &run) == FDREG_ERR_CONFIG);
  CHECK(std::string(fdreg_last_error()).find("scheme") != std::string::npos);

  CHECK(fdreg_run_open(nullptr, &run) == FDREG_ERR_ARGUMENT);
  CHECK(fdreg_run_execute(nullptr) == FDREG_ERR_ARGUMENT);
}

TEST_CASE("a tiny experiment runs end to end and is byte-reproducible") {
  const std::string config = write_config("tiny.cfg", kTinyConfig);
  const fs::path out_a = tmp_dir("capi_run_a");
  const fs::path out_b = tmp_dir("capi_run_b");

  const auto run_once = [&](const fs::path& out) {
    fdreg_run* run = nullptr;
    REQUIRE(fdreg_run_open(config.c_str(), &run) == FDREG_OK);
    CHECK(fdreg_run_artifact_dir(run) == nullptr);
    REQUIRE(fdreg_run_set_output_dir(run, out.string().c_str()) == FDREG_OK);
    REQUIRE(fdreg_run_execute(run) == FDREG_OK);
    const std::string dir = fdreg_run_artifact_dir(run);
    fdreg_run_close(run);
    return dir;
  };
  const std::string dir_a = run_once(out_a);
  const std::string dir_b = run_once(out_b);

  CHECK(fs::exists(fs::path(dir_a) / "metrics.csv"));
  CHECK(fs::exists(fs::path(dir_a) / "errors_client_1.csv"));
  CHECK(fs::exists(fs::path(dir_a) / "errors_client_2.csv"));
  CHECK(fs::exists(fs::path(dir_a) / "config.resolved.cfg"));

  const std::string metrics_a = slurp(fs::path(dir_a) / "metrics.csv");
  const std::string metrics_b = slurp(fs::path(dir_b) / "metrics.csv");
  CHECK(metrics_a == metrics_b);

  // 3 rounds x 2 clients plus the header
  int lines = 0;
  for (const char c : metrics_a) lines += c == '\n';
  CHECK(lines == 7);
}

TEST_CASE("seed overrides change the artifacts") {
  const std::string config = write_config("tiny2.cfg", kTinyConfig);
  const fs::path out = tmp_dir("capi_seed");
  const auto run_with_seed = [&](int64_t seed) {
    fdreg_run* run = nullptr;
    REQUIRE(fdreg_run_open(config.c_str(), &run) == FDREG_OK);
    fdreg_run_set_output_dir(run, out.string().c_str());
    fdreg_run_set_seed(run, seed);
    REQUIRE(fdreg_run_execute(run) == FDREG_OK);
    const std::string metrics = slurp(fs::path(fdreg_run_artifact_dir(run)) / "metrics.csv");
    fdreg_run_close(run);
    return metrics;
  };
  CHECK(run_with_seed(1) != run_with_seed(2));
}

TEST_CASE("the sweep entry point writes a summary") {
  const std::string config = write_config(
      "sweep.cfg", std::string(kTinyConfig) + "sweep.schemes = fd,fl\nsweep.clients = 2,3\n");
  const fs::path out = tmp_dir("capi_sweep");
  fdreg_run* run = nullptr;
  REQUIRE(fdreg_run_open(config.c_str(), &run) == FDREG_OK);
  fdreg_run_set_output_dir(run, out.string().c_str());
  REQUIRE(fdreg_run_execute_sweep(run) == FDREG_OK);
  const fs::path dir = fdreg_run_artifact_dir(run);
  fdreg_run_close(run);

  const std::string summary = slurp(dir / "summary.csv");
  int lines = 0;
  for (const char c : summary) lines += c == '\n';
  CHECK(lines == 5);  // header + 2 schemes x 2 client counts
  CHECK(summary.find("scheme,clients,lambda,segments,final_mae,final_rmse,total_bits") == 0);
  CHECK(fs::exists(dir / "fd_k2_lambda0.1_s4" / "metrics.csv"));
  CHECK(fs::exists(dir / "fl_k3_lambda0.1_s0" / "metrics.csv"));
}

TEST_CASE("gen-data dumps a reloadable dataset") {
  const std::string config = write_config("gen.cfg", kTinyConfig);
  const fs::path out = tmp_dir("capi_gen");
  fdreg_run* run = nullptr;
  REQUIRE(fdreg_run_open(config.c_str(), &run) == FDREG_OK);
  fdreg_run_set_output_dir(run, out.string().c_str());
  REQUIRE(fdreg_run_generate_data(run) == FDREG_OK);
  const fs::path dir = fdreg_run_artifact_dir(run);
  fdreg_run_close(run);

  CHECK(fs::exists(dir / "dataset.csv"));
  CHECK(fs::exists(dir / "dataset.meta"));
  const std::string meta = slurp(dir / "dataset.meta");
  CHECK(meta.find("rows=48") != std::string::npos);  // 16 reference points x 3 repetitions
  const std::string csv = slurp(dir / "dataset.csv");
  CHECK(csv.rfind("rssi_0,", 0) == 0);
}
