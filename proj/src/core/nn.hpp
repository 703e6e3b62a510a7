#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/segmentation.hpp"

namespace fdreg {

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

enum class HiddenActivation { kRelu };

// Dense input -> hidden -> output perceptron with a linear output layer.
struct MlpModel {
  Matrix input_weights;             // Ni x Nh
  std::vector<double> hidden_bias;  // Nh
  Matrix output_weights;            // Nh x No
  std::vector<double> output_bias;  // No
  HiddenActivation hidden_activation = HiddenActivation::kRelu;

  std::size_t input_units() const { return input_weights.rows; }
  std::size_t hidden_units() const { return input_weights.cols; }
  std::size_t output_units() const { return output_weights.cols; }
  std::size_t parameter_count() const;
  bool finite() const;
};

// Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer. The
// 1/sqrt(Nh) output scale is absorbed into the output layer's init range.
MlpModel init_model(std::size_t input_units, std::size_t hidden_units,
                    std::size_t output_units, std::uint64_t seed);

// Parameter-shaped bundle used for gradients and optimizer moments.
struct ParamGrads {
  Matrix input_weights;
  std::vector<double> hidden_bias;
  Matrix output_weights;
  std::vector<double> output_bias;
};

ParamGrads make_zero_grads(const MlpModel& model);

void forward(const MlpModel& model, std::span<const double> features,
             std::span<double> out);
std::vector<double> forward(const MlpModel& model, std::span<const double> features);

struct Sample {
  std::span<const double> features;
  std::span<const double> target;
};

enum class LossMode { kPlain, kDistill };

struct LossConfig {
  LossMode mode = LossMode::kPlain;
  double lambda = 0.0;  // distillation weight
};

// Batch-summed squared error, plus in distill mode the weighted squared gap
// between each output and the teacher value of the *label's* segment:
//   sum_i ||y_i - yhat_i||^2
//   + lambda * sum_i sum_d (teacher[d, segment(y_{i,d})] - yhat_{i,d})^2
// Absent teacher cells contribute nothing. Distill mode requires both a
// scheme and a teacher table.
double loss(const MlpModel& model, std::span<const Sample> batch, const LossConfig& config,
            const SegmentScheme* scheme = nullptr, const TeacherTable* teacher = nullptr);

ParamGrads gradient(const MlpModel& model, std::span<const Sample> batch,
                    const LossConfig& config, const SegmentScheme* scheme = nullptr,
                    const TeacherTable* teacher = nullptr);

// Single pass filling `grads` (reused across batches) and returning the
// batch loss. When `predictions` is non-null it receives the batch's
// forward outputs, batch-major (the same values the gradient saw).
double loss_and_gradient(const MlpModel& model, std::span<const Sample> batch,
                         const LossConfig& config, const SegmentScheme* scheme,
                         const TeacherTable* teacher, ParamGrads& grads,
                         std::vector<double>* predictions = nullptr);

struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.1;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  ParamGrads first_moment;
  ParamGrads second_moment;
};

AdamState init_adam(const MlpModel& model, double learning_rate, double beta1, double beta2,
                    double epsilon);

// Standard bias-corrected Adam update.
void adam_step(MlpModel& model, AdamState& state, const ParamGrads& grads);

}  // namespace fdreg
