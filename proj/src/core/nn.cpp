#include "core/nn.hpp"

#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fdreg {

namespace {

bool all_finite(std::span<const double> values) {
  for (const double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_batch(const MlpModel& model, std::span<const Sample> batch) {
  for (const Sample& sample : batch) {
    if (sample.features.size() != model.input_units() ||
        sample.target.size() != model.output_units()) {
      throw ConfigError("batch sample dimensions do not match the model");
    }
  }
}

void check_distill_inputs(const LossConfig& config, const MlpModel& model,
                          const SegmentScheme* scheme, const TeacherTable* teacher) {
  if (config.lambda < 0.0) throw ConfigError("distillation weight must be nonnegative");
  if (config.mode != LossMode::kDistill) return;
  if (scheme == nullptr || teacher == nullptr) {
    throw ConfigError("distillation loss requires a segment scheme and a teacher table");
  }
  if (scheme->dimensions() != model.output_units() ||
      teacher->values.dimensions() != model.output_units() ||
      teacher->values.segments() != scheme->segment_count()) {
    throw ConfigError("segment scheme / teacher table shape does not match the model");
  }
}

// Per-sample forward keeping pre-activations for the backward pass.
struct Scratch {
  std::vector<double> pre_activation;  // Nh
  std::vector<double> hidden;          // Nh
  std::vector<double> output;          // No
  std::vector<double> output_grad;     // No
  std::vector<double> hidden_grad;     // Nh

  void resize(const MlpModel& model) {
    pre_activation.assign(model.hidden_units(), 0.0);
    hidden.assign(model.hidden_units(), 0.0);
    output.assign(model.output_units(), 0.0);
    output_grad.assign(model.output_units(), 0.0);
    hidden_grad.assign(model.hidden_units(), 0.0);
  }
};

void forward_into(const MlpModel& model, std::span<const double> x, Scratch& s) {
  const std::size_t ni = model.input_units();
  const std::size_t nh = model.hidden_units();
  const std::size_t no = model.output_units();
  const double* w1 = model.input_weights.data.data();
  const double* w2 = model.output_weights.data.data();

  std::copy(model.hidden_bias.begin(), model.hidden_bias.end(), s.pre_activation.begin());
  for (std::size_t i = 0; i < ni; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* row = w1 + i * nh;
    for (std::size_t j = 0; j < nh; ++j) s.pre_activation[j] += xi * row[j];
  }
  for (std::size_t j = 0; j < nh; ++j) {
    s.hidden[j] = s.pre_activation[j] > 0.0 ? s.pre_activation[j] : 0.0;
  }
  std::copy(model.output_bias.begin(), model.output_bias.end(), s.output.begin());
  for (std::size_t j = 0; j < nh; ++j) {
    const double hj = s.hidden[j];
    if (hj == 0.0) continue;
    const double* row = w2 + j * no;
    for (std::size_t d = 0; d < no; ++d) s.output[d] += hj * row[d];
  }
}

// d(loss_i)/d(yhat_d); returns the sample's loss contribution
double output_gradient(const MlpModel& model, const Sample& sample, const LossConfig& config,
                       const SegmentScheme* scheme, const TeacherTable* teacher, Scratch& s) {
  const std::size_t no = model.output_units();
  double sample_loss = 0.0;
  for (std::size_t d = 0; d < no; ++d) {
    const double err = s.output[d] - sample.target[d];
    sample_loss += err * err;
    s.output_grad[d] = 2.0 * err;
  }
  if (config.mode == LossMode::kDistill && config.lambda > 0.0) {
    for (std::size_t d = 0; d < no; ++d) {
      const std::size_t segment = scheme->assign(d, sample.target[d]);
      const auto& cell = teacher->values.cell(d, segment);
      if (!cell.has_value()) continue;
      const double gap = s.output[d] - *cell;
      sample_loss += config.lambda * gap * gap;
      s.output_grad[d] += 2.0 * config.lambda * gap;
    }
  }
  return sample_loss;
}

void zero_grads(ParamGrads& grads) {
  std::fill(grads.input_weights.data.begin(), grads.input_weights.data.end(), 0.0);
  std::fill(grads.hidden_bias.begin(), grads.hidden_bias.end(), 0.0);
  std::fill(grads.output_weights.data.begin(), grads.output_weights.data.end(), 0.0);
  std::fill(grads.output_bias.begin(), grads.output_bias.end(), 0.0);
}

void adam_update(std::span<double> params, std::span<double> m, std::span<double> v,
                 std::span<const double> grads, const AdamState& state, double bc1,
                 double bc2) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
    v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
  return input_weights.data.size() + hidden_bias.size() + output_weights.data.size() +
         output_bias.size();
}

bool MlpModel::finite() const {
  return all_finite(input_weights.data) && all_finite(hidden_bias) &&
         all_finite(output_weights.data) && all_finite(output_bias);
}

MlpModel init_model(std::size_t input_units, std::size_t hidden_units,
                    std::size_t output_units, std::uint64_t seed) {
  if (input_units < 1 || hidden_units < 1 || output_units < 1) {
    throw ConfigError("model dimensions must be strictly positive");
  }
  MlpModel model;
  model.input_weights = Matrix(input_units, hidden_units);
  model.hidden_bias.assign(hidden_units, 0.0);
  model.output_weights = Matrix(hidden_units, output_units);
  model.output_bias.assign(output_units, 0.0);

  Rng rng(seed);
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_units));
  for (double& w : model.input_weights.data) w = rng.uniform(-in_bound, in_bound);
  for (double& b : model.hidden_bias) b = rng.uniform(-in_bound, in_bound);
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden_units));
  for (double& w : model.output_weights.data) w = rng.uniform(-out_bound, out_bound);
  for (double& b : model.output_bias) b = rng.uniform(-out_bound, out_bound);
  return model;
}

ParamGrads make_zero_grads(const MlpModel& model) {
  ParamGrads grads;
  grads.input_weights = Matrix(model.input_units(), model.hidden_units());
  grads.hidden_bias.assign(model.hidden_units(), 0.0);
  grads.output_weights = Matrix(model.hidden_units(), model.output_units());
  grads.output_bias.assign(model.output_units(), 0.0);
  return grads;
}

void forward(const MlpModel& model, std::span<const double> features,
             std::span<double> out) {
  if (features.size() != model.input_units() || out.size() != model.output_units()) {
    throw ConfigError("forward: feature or output size does not match the model");
  }
  static thread_local Scratch scratch;
  scratch.resize(model);
  forward_into(model, features, scratch);
  std::copy(scratch.output.begin(), scratch.output.end(), out.begin());
}

std::vector<double> forward(const MlpModel& model, std::span<const double> features) {
  std::vector<double> out(model.output_units(), 0.0);
  forward(model, features, out);
  return out;
}

double loss(const MlpModel& model, std::span<const Sample> batch, const LossConfig& config,
            const SegmentScheme* scheme, const TeacherTable* teacher) {
  check_batch(model, batch);
  check_distill_inputs(config, model, scheme, teacher);
  Scratch scratch;
  scratch.resize(model);
  double total = 0.0;
  for (const Sample& sample : batch) {
    forward_into(model, sample.features, scratch);
    total += output_gradient(model, sample, config, scheme, teacher, scratch);
  }
  return total;
}

double loss_and_gradient(const MlpModel& model, std::span<const Sample> batch,
                         const LossConfig& config, const SegmentScheme* scheme,
                         const TeacherTable* teacher, ParamGrads& grads,
                         std::vector<double>* predictions) {
  check_batch(model, batch);
  check_distill_inputs(config, model, scheme, teacher);
  if (grads.input_weights.rows != model.input_units() ||
      grads.input_weights.cols != model.hidden_units() ||
      grads.output_weights.cols != model.output_units()) {
    throw ConfigError("gradient buffer shape does not match the model");
  }
  const std::size_t ni = model.input_units();
  const std::size_t nh = model.hidden_units();
  const std::size_t no = model.output_units();

  zero_grads(grads);
  if (predictions != nullptr) {
    predictions->clear();
    predictions->reserve(batch.size() * no);
  }

  static thread_local Scratch scratch;
  scratch.resize(model);

  const double* w2 = model.output_weights.data.data();
  double* gw1 = grads.input_weights.data.data();
  double* gw2 = grads.output_weights.data.data();

  double total = 0.0;
  for (const Sample& sample : batch) {
    forward_into(model, sample.features, scratch);
    if (predictions != nullptr) {
      predictions->insert(predictions->end(), scratch.output.begin(), scratch.output.end());
    }
    total += output_gradient(model, sample, config, scheme, teacher, scratch);

    for (std::size_t d = 0; d < no; ++d) grads.output_bias[d] += scratch.output_grad[d];
    for (std::size_t j = 0; j < nh; ++j) {
      const double hj = scratch.hidden[j];
      if (hj > 0.0) {
        const double* w_row = w2 + j * no;
        double* g_row = gw2 + j * no;
        double back = 0.0;
        for (std::size_t d = 0; d < no; ++d) {
          g_row[d] += hj * scratch.output_grad[d];
          back += w_row[d] * scratch.output_grad[d];
        }
        scratch.hidden_grad[j] = back;
        grads.hidden_bias[j] += back;
      } else {
        scratch.hidden_grad[j] = 0.0;
      }
    }
    for (std::size_t i = 0; i < ni; ++i) {
      const double xi = sample.features[i];
      if (xi == 0.0) continue;
      double* g_row = gw1 + i * nh;
      for (std::size_t j = 0; j < nh; ++j) g_row[j] += xi * scratch.hidden_grad[j];
    }
  }
  return total;
}

ParamGrads gradient(const MlpModel& model, std::span<const Sample> batch,
                    const LossConfig& config, const SegmentScheme* scheme,
                    const TeacherTable* teacher) {
  ParamGrads grads = make_zero_grads(model);
  loss_and_gradient(model, batch, config, scheme, teacher, grads, nullptr);
  return grads;
}

AdamState init_adam(const MlpModel& model, double learning_rate, double beta1, double beta2,
                    double epsilon) {
  if (learning_rate <= 0.0 || epsilon <= 0.0) {
    throw ConfigError("adam: learning rate and epsilon must be positive");
  }
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw ConfigError("adam: decay rates must lie in [0, 1)");
  }
  AdamState state;
  state.learning_rate = learning_rate;
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.epsilon = epsilon;
  state.first_moment = make_zero_grads(model);
  state.second_moment = make_zero_grads(model);
  return state;
}

void adam_step(MlpModel& model, AdamState& state, const ParamGrads& grads) {
  if (state.first_moment.input_weights.data.size() != model.input_weights.data.size() ||
      grads.input_weights.data.size() != model.input_weights.data.size()) {
    throw ConfigError("adam: state or gradient shape does not match the model");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  adam_update(model.input_weights.data, state.first_moment.input_weights.data,
              state.second_moment.input_weights.data, grads.input_weights.data, state, bc1,
              bc2);
  adam_update(model.hidden_bias, state.first_moment.hidden_bias,
              state.second_moment.hidden_bias, grads.hidden_bias, state, bc1, bc2);
  adam_update(model.output_weights.data, state.first_moment.output_weights.data,
              state.second_moment.output_weights.data, grads.output_weights.data, state, bc1,
              bc2);
  adam_update(model.output_bias, state.first_moment.output_bias,
              state.second_moment.output_bias, grads.output_bias, state, bc1, bc2);
}

}  // namespace fdreg
