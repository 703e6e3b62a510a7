// Experiment runner over the fdreg C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fdreg.h"

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir;
  std::int64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("config", args.config, "experiment configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
  cmd->add_option("--seed", args.seed, "master seed (overrides seed)")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

int run_command(const CommonArgs& args, fdreg_status (*execute)(fdreg_run*)) {
  fdreg_run* run = nullptr;
  fdreg_status status = fdreg_run_open(args.config.c_str(), &run);
  if (status != FDREG_OK) {
    std::fprintf(stderr, "fdreg: %s: %s\n", fdreg_status_name(status), fdreg_last_error());
    return 1;
  }
  if (!args.out_dir.empty()) fdreg_run_set_output_dir(run, args.out_dir.c_str());
  if (args.seed_set) fdreg_run_set_seed(run, args.seed);

  status = execute(run);
  if (status != FDREG_OK) {
    std::fprintf(stderr, "fdreg: %s: %s\n", fdreg_status_name(status), fdreg_last_error());
    fdreg_run_close(run);
    return 1;
  }
  std::printf("%s\n", fdreg_run_artifact_dir(run));
  fdreg_run_close(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fdreg: federated distillation experiments for RSSI localization"};
  app.set_version_flag("--version", std::string(fdreg_version()));
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
  add_common(run_cmd, run_args);

  CommonArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run every point of the sweep grid");
  add_common(sweep_cmd, sweep_args);

  CommonArgs data_args;
  CLI::App* data_cmd = app.add_subcommand("gen-data", "dump a synthetic fingerprint dataset");
  add_common(data_cmd, data_args);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return run_command(run_args, fdreg_run_execute);
  if (sweep_cmd->parsed()) return run_command(sweep_args, fdreg_run_execute_sweep);
  if (data_cmd->parsed()) return run_command(data_args, fdreg_run_generate_data);
  return 1;
}
