#include "core/comms.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace fdreg {

std::uint64_t mlp_parameter_count(std::uint64_t input_units, std::uint64_t hidden_units,
                                  std::uint64_t output_units) {
  return input_units * hidden_units + hidden_units + hidden_units * output_units +
         output_units;
}

std::uint64_t fd_bits_per_client_round(std::uint64_t segments, std::uint64_t output_units,
                                       std::uint64_t bits_resolution) {
  if (segments < 1 || output_units < 1 || bits_resolution < 1) {
    throw ConfigError("fd_bits_per_client_round: all arguments must be >= 1");
  }
  return segments * output_units * bits_resolution;
}

std::uint64_t fl_bits_per_client_round(std::uint64_t input_units, std::uint64_t hidden_units,
                                       std::uint64_t output_units,
                                       std::uint64_t bits_resolution) {
  if (input_units < 1 || hidden_units < 1 || output_units < 1 || bits_resolution < 1) {
    throw ConfigError("fl_bits_per_client_round: all arguments must be >= 1");
  }
  return mlp_parameter_count(input_units, hidden_units, output_units) * bits_resolution;
}

double fd_to_fl_ratio(std::uint64_t fd_bits, std::uint64_t fl_bits) {
  if (fl_bits == 0) throw ConfigError("fd_to_fl_ratio: zero denominator");
  return static_cast<double>(fd_bits) / static_cast<double>(fl_bits);
}

double shannon_max_bits(double channels, double devices, double channel_gain_sq,
                        double power_w) {
  if (channels < 1.0 || devices < 1.0) {
    throw ConfigError("shannon_max_bits: channels and devices must be >= 1");
  }
  if (channel_gain_sq < 0.0 || power_w < 0.0) {
    throw ConfigError("shannon_max_bits: gain and power must be nonnegative");
  }
  return channels / devices * std::log2(1.0 + devices * channel_gain_sq * power_w);
}

BudgetCheck check_budget(double payload_bits, double budget_bits) {
  BudgetCheck result;
  result.payload_bits = payload_bits;
  result.budget_bits = budget_bits;
  result.ok = payload_bits < budget_bits;  // strict inequality
  return result;
}

double total_energy(double compute_per_round_j, double transmit_per_round_j,
                    std::uint64_t rounds) {
  if (compute_per_round_j < 0.0 || transmit_per_round_j < 0.0) {
    throw ConfigError("total_energy: energies must be nonnegative");
  }
  return (compute_per_round_j + transmit_per_round_j) * static_cast<double>(rounds);
}

void check_lightweight_payload(std::uint64_t segments, std::uint64_t input_units,
                               std::uint64_t hidden_units, std::uint64_t output_units) {
  if (hidden_units < output_units || input_units < 1) return;
  if (segments * output_units > input_units * hidden_units) return;
  const std::uint64_t weights = mlp_parameter_count(input_units, hidden_units, output_units);
  if (segments * output_units >= weights) {
    throw ConfigError("distillation payload (" + std::to_string(segments * output_units) +
                      " values) is not smaller than the model (" + std::to_string(weights) +
                      " parameters)");
  }
}

}  // namespace fdreg
