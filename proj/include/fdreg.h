/*
 * fdreg — federated distillation for regression, C API.
 *
 * The library runs simulated federated-distillation experiments (plus
 * federated-averaging, standalone and centralized baselines) over RSSI
 * fingerprint data, with exact uplink bit and energy accounting, and
 * writes metric/error CSV artifacts to disk.
 *
 * All handles are opaque; every fallible call returns an fdreg_status and
 * leaves a human-readable detail in fdreg_last_error() (thread-local).
 */
#ifndef FDREG_H
#define FDREG_H

#include <stdint.h>

#if defined(_WIN32)
#define FDREG_API __declspec(dllexport)
#else
#define FDREG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdreg_status {
  FDREG_OK = 0,
  FDREG_ERR_ARGUMENT = 1, /* null pointer or out-of-domain argument */
  FDREG_ERR_CONFIG = 2,   /* invalid or inconsistent configuration  */
  FDREG_ERR_IO = 3,       /* filesystem failure                     */
  FDREG_ERR_RUNTIME = 4,  /* training failure (e.g. divergence)     */
} fdreg_status;

/* Experiment handle bound to one parsed configuration file. */
typedef struct fdreg_run fdreg_run;

FDREG_API const char* fdreg_version(void);
FDREG_API const char* fdreg_status_name(fdreg_status status);

/* Detail message of the most recent failure on this thread ("" if none). */
FDREG_API const char* fdreg_last_error(void);

/* Parse and validate a configuration file. On success *out_run owns the
 * experiment and must be released with fdreg_run_close(). */
FDREG_API fdreg_status fdreg_run_open(const char* config_path, fdreg_run** out_run);
FDREG_API void fdreg_run_close(fdreg_run* run);

/* Optional overrides, applied before execution. */
FDREG_API fdreg_status fdreg_run_set_output_dir(fdreg_run* run, const char* dir);
FDREG_API fdreg_status fdreg_run_set_seed(fdreg_run* run, int64_t seed);

/* Execute the configured experiment / the configured sweep grid / a
 * synthetic dataset dump. Artifacts land in a fresh timestamped directory
 * under the configured output directory. */
FDREG_API fdreg_status fdreg_run_execute(fdreg_run* run);
FDREG_API fdreg_status fdreg_run_execute_sweep(fdreg_run* run);
FDREG_API fdreg_status fdreg_run_generate_data(fdreg_run* run);

/* Absolute artifact directory of the last successful execution on this
 * handle, or NULL before one. The string lives as long as the handle. */
FDREG_API const char* fdreg_run_artifact_dir(const fdreg_run* run);

/* Exact uplink accounting (pure arithmetic, no handle needed). */
FDREG_API uint64_t fdreg_fd_bits_per_client_round(uint64_t segments, uint64_t output_units,
                                                  uint64_t bits_resolution);
FDREG_API uint64_t fdreg_fl_bits_per_client_round(uint64_t input_units,
                                                  uint64_t hidden_units,
                                                  uint64_t output_units,
                                                  uint64_t bits_resolution);
/* Per-device bit budget of a shared Gaussian uplink. */
FDREG_API double fdreg_shannon_max_bits(double channels, double devices,
                                        double channel_gain_sq, double power_w);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FDREG_H */
