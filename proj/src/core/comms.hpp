#pragma once

#include <cstdint>

namespace fdreg {

// Uplink accounting knobs. Transmission is modeled through its bit and
// energy cost only; payloads are never corrupted.
struct CommsConfig {
  std::uint32_t bits_resolution = 32;      // bits per transmitted real value
  double channels = 500.0;                 // shared uplink channels
  double max_power_w = 31.0;               // per-device transmit power cap
  double channel_gain_sq = 1.0;            // |h|^2
  double energy_per_bit_j = 5e-8;          // transmit energy model
  double energy_per_param_update_j = 1e-12;  // compute energy model
};

// Model parameter count of the dense input->hidden->output perceptron.
std::uint64_t mlp_parameter_count(std::uint64_t input_units, std::uint64_t hidden_units,
                                  std::uint64_t output_units);

// Distillation upload: one value per (segment, output dimension).
std::uint64_t fd_bits_per_client_round(std::uint64_t segments, std::uint64_t output_units,
                                       std::uint64_t bits_resolution);

// Parameter upload: every model weight and bias.
std::uint64_t fl_bits_per_client_round(std::uint64_t input_units, std::uint64_t hidden_units,
                                       std::uint64_t output_units,
                                       std::uint64_t bits_resolution);

double fd_to_fl_ratio(std::uint64_t fd_bits, std::uint64_t fl_bits);

// Per-device bit budget of a shared Gaussian uplink:
// (channels / devices) * log2(1 + devices * gain_sq * power).
double shannon_max_bits(double channels, double devices, double channel_gain_sq,
                        double power_w);

struct BudgetCheck {
  bool ok = false;  // payload strictly below budget
  double payload_bits = 0.0;
  double budget_bits = 0.0;
};

BudgetCheck check_budget(double payload_bits, double budget_bits);

// (compute + transmit) * rounds
double total_energy(double compute_per_round_j, double transmit_per_round_j,
                    std::uint64_t rounds);

// Sanity assertion that the distillation payload is smaller than the model:
// whenever hidden_units >= output_units and segments <= Ni*Nh/No, require
// segments * output_units < parameter count. Throws ConfigError otherwise.
void check_lightweight_payload(std::uint64_t segments, std::uint64_t input_units,
                               std::uint64_t hidden_units, std::uint64_t output_units);

}  // namespace fdreg
