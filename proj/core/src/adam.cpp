#include "asyncopt/net/adam.hpp"

#include <cmath>

#include <fmt/format.h>

#include "asyncopt/error.hpp"

namespace asyncopt::net {

OptimizerState OptimizerState::fresh(std::size_t length, double step_size, double beta1,
                                     double beta2, double epsilon) {
  OptimizerState state;
  state.first_moment.assign(length, 0.0);
  state.second_moment.assign(length, 0.0);
  state.step_size = step_size;
  state.beta1 = beta1;
  state.beta2 = beta2;
  state.epsilon = epsilon;
  return state;
}

void apply_optimizer_step(ParamSet& params, const Gradient& grad, OptimizerState& state) {
  const auto n = params.values.size();
  if (grad.values.size() != n || state.first_moment.size() != n ||
      state.second_moment.size() != n) {
    throw DimensionError(fmt::format(
        "optimizer shape mismatch: params {}, gradient {}, moments {}/{}", n, grad.values.size(),
        state.first_moment.size(), state.second_moment.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grad.values[i])) {
      throw NumericError(fmt::format("non-finite gradient entry at index {}; step refused", i));
    }
  }

  const auto step = state.step + 1;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(step));
  std::vector<double> updated(params.values);
  std::vector<double> first(state.first_moment);
  std::vector<double> second(state.second_moment);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad.values[i];
    const double m = state.beta1 * first[i] + (1.0 - state.beta1) * g;
    const double v = state.beta2 * second[i] + (1.0 - state.beta2) * g * g;
    first[i] = m;
    second[i] = v;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    updated[i] -= state.step_size * m_hat / (std::sqrt(v_hat) + state.epsilon);
    if (!std::isfinite(updated[i])) {
      throw NumericError(fmt::format("optimizer produced a non-finite parameter at index {}", i));
    }
  }
  params.values = std::move(updated);
  state.first_moment = std::move(first);
  state.second_moment = std::move(second);
  state.step = step;
}

std::pair<ParamSet, OptimizerState> optimizer_step(const ParamSet& params, const Gradient& grad,
                                                   const OptimizerState& state) {
  ParamSet next_params = params;
  OptimizerState next_state = state;
  apply_optimizer_step(next_params, grad, next_state);
  return {std::move(next_params), std::move(next_state)};
}

double clip_grad_norm(Gradient& grad, double max_norm) {
  double sq = 0.0;
  for (double g : grad.values) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad.values) g *= scale;
  }
  return norm;
}

}  // namespace asyncopt::net
