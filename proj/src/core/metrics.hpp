#pragma once

#include <span>
#include <vector>

namespace fdreg {

struct EvalResult {
  double mae = 0.0;
  double rmse = 0.0;
  std::vector<double> per_sample_errors;  // euclidean error per sample
};

// Mean absolute error over flat row-major arrays of `dims`-dimensional
// points: (1/N) * sum_i (sum_d |e_{i,d}|) / dims. Note the division by the
// dimension count: for 2-D positions this is half the usual L1 mean.
double mean_absolute_error(std::span<const double> truth,
                           std::span<const double> predicted, std::size_t dims);

// sqrt of the mean squared euclidean error
double root_mean_squared_error(std::span<const double> truth,
                               std::span<const double> predicted, std::size_t dims);

EvalResult evaluate(std::span<const double> truth, std::span<const double> predicted,
                    std::size_t dims);

}  // namespace fdreg
