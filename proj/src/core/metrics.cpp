#include "core/metrics.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace fdreg {

namespace {

std::size_t checked_sample_count(std::span<const double> truth,
                                 std::span<const double> predicted, std::size_t dims) {
  if (dims == 0) throw ConfigError("metrics: dimension count must be positive");
  if (truth.size() != predicted.size()) {
    throw ConfigError("metrics: truth and prediction lengths differ");
  }
  if (truth.empty()) throw ConfigError("metrics: empty sample set");
  if (truth.size() % dims != 0) {
    throw ConfigError("metrics: array length is not a multiple of the dimension count");
  }
  return truth.size() / dims;
}

}  // namespace

double mean_absolute_error(std::span<const double> truth,
                           std::span<const double> predicted, std::size_t dims) {
  const std::size_t n = checked_sample_count(truth, predicted, dims);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sample = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      sample += std::abs(truth[i * dims + d] - predicted[i * dims + d]);
    }
    total += sample / static_cast<double>(dims);
  }
  return total / static_cast<double>(n);
}

double root_mean_squared_error(std::span<const double> truth,
                               std::span<const double> predicted, std::size_t dims) {
  const std::size_t n = checked_sample_count(truth, predicted, dims);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double e = truth[i * dims + d] - predicted[i * dims + d];
      total += e * e;
    }
  }
  return std::sqrt(total / static_cast<double>(n));
}

EvalResult evaluate(std::span<const double> truth, std::span<const double> predicted,
                    std::size_t dims) {
  const std::size_t n = checked_sample_count(truth, predicted, dims);
  EvalResult result;
  result.mae = mean_absolute_error(truth, predicted, dims);
  result.rmse = root_mean_squared_error(truth, predicted, dims);
  result.per_sample_errors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double e = truth[i * dims + d] - predicted[i * dims + d];
      sq += e * e;
    }
    result.per_sample_errors.push_back(std::sqrt(sq));
  }
  return result;
}

}  // namespace fdreg
