#include "fdreg.h"

#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "core/comms.hpp"
#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
fdreg_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FDREG_OK;
  } catch (const fdreg::TrainingDiverged& e) {
    set_error(e.what());
    return FDREG_ERR_RUNTIME;
  } catch (const fdreg::IoError& e) {
    set_error(e.what());
    return FDREG_ERR_IO;
  } catch (const fdreg::ParseError& e) {
    set_error(e.what());
    return FDREG_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return FDREG_ERR_CONFIG;
  } catch (const std::filesystem::filesystem_error& e) {
    set_error(e.what());
    return FDREG_ERR_IO;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return FDREG_ERR_RUNTIME;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FDREG_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return FDREG_ERR_RUNTIME;
  }
}

}  // namespace

struct fdreg_run {
  fdreg::ExperimentConfig config;
  fdreg::RunOverrides overrides;
  std::string artifact_dir;
};

extern "C" {

const char* fdreg_version(void) { return "0.1.0"; }

const char* fdreg_status_name(fdreg_status status) {
  switch (status) {
    case FDREG_OK: return "ok";
    case FDREG_ERR_ARGUMENT: return "argument error";
    case FDREG_ERR_CONFIG: return "configuration error";
    case FDREG_ERR_IO: return "io error";
    case FDREG_ERR_RUNTIME: return "runtime error";
  }
  return "unknown status";
}

const char* fdreg_last_error(void) { return g_last_error.c_str(); }

fdreg_status fdreg_run_open(const char* config_path, fdreg_run** out_run) {
  if (config_path == nullptr || out_run == nullptr) {
    set_error("fdreg_run_open: null argument");
    return FDREG_ERR_ARGUMENT;
  }
  *out_run = nullptr;
  return guarded([&] {
    auto run = std::make_unique<fdreg_run>();
    run->config = fdreg::parse_config_file(config_path);
    fdreg::validate(run->config);
    *out_run = run.release();
  });
}

void fdreg_run_close(fdreg_run* run) { delete run; }

fdreg_status fdreg_run_set_output_dir(fdreg_run* run, const char* dir) {
  if (run == nullptr || dir == nullptr) {
    set_error("fdreg_run_set_output_dir: null argument");
    return FDREG_ERR_ARGUMENT;
  }
  run->overrides.output_dir = dir;
  g_last_error.clear();
  return FDREG_OK;
}

fdreg_status fdreg_run_set_seed(fdreg_run* run, int64_t seed) {
  if (run == nullptr) {
    set_error("fdreg_run_set_seed: null handle");
    return FDREG_ERR_ARGUMENT;
  }
  run->overrides.seed = static_cast<std::uint64_t>(seed);
  g_last_error.clear();
  return FDREG_OK;
}

fdreg_status fdreg_run_execute(fdreg_run* run) {
  if (run == nullptr) {
    set_error("fdreg_run_execute: null handle");
    return FDREG_ERR_ARGUMENT;
  }
  return guarded([&] {
    const auto outcome = fdreg::execute_run(run->config, run->overrides);
    run->artifact_dir = std::filesystem::absolute(outcome.artifact_dir).string();
  });
}

fdreg_status fdreg_run_execute_sweep(fdreg_run* run) {
  if (run == nullptr) {
    set_error("fdreg_run_execute_sweep: null handle");
    return FDREG_ERR_ARGUMENT;
  }
  return guarded([&] {
    const auto outcome = fdreg::execute_sweep(run->config, run->overrides);
    run->artifact_dir = std::filesystem::absolute(outcome.artifact_dir).string();
  });
}

fdreg_status fdreg_run_generate_data(fdreg_run* run) {
  if (run == nullptr) {
    set_error("fdreg_run_generate_data: null handle");
    return FDREG_ERR_ARGUMENT;
  }
  return guarded([&] {
    const auto outcome = fdreg::generate_data_dump(run->config, run->overrides);
    run->artifact_dir = std::filesystem::absolute(outcome.artifact_dir).string();
  });
}

const char* fdreg_run_artifact_dir(const fdreg_run* run) {
  if (run == nullptr || run->artifact_dir.empty()) return nullptr;
  return run->artifact_dir.c_str();
}

uint64_t fdreg_fd_bits_per_client_round(uint64_t segments, uint64_t output_units,
                                        uint64_t bits_resolution) {
  uint64_t bits = 0;
  const fdreg_status status = guarded([&] {
    bits = fdreg::fd_bits_per_client_round(segments, output_units, bits_resolution);
  });
  return status == FDREG_OK ? bits : 0;
}

uint64_t fdreg_fl_bits_per_client_round(uint64_t input_units, uint64_t hidden_units,
                                        uint64_t output_units, uint64_t bits_resolution) {
  uint64_t bits = 0;
  const fdreg_status status = guarded([&] {
    bits = fdreg::fl_bits_per_client_round(input_units, hidden_units, output_units,
                                           bits_resolution);
  });
  return status == FDREG_OK ? bits : 0;
}

double fdreg_shannon_max_bits(double channels, double devices, double channel_gain_sq,
                              double power_w) {
  double bits = 0.0;
  const fdreg_status status = guarded([&] {
    bits = fdreg::shannon_max_bits(channels, devices, channel_gain_sq, power_w);
  });
  return status == FDREG_OK ? bits : 0.0;
}

}  // extern "C"
