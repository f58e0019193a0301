#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "asyncopt/net/mlp.hpp"

namespace asyncopt::net {

/// Bias-corrected adaptive-moment optimizer state for one ParamSet.
struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;
  double step_size = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static OptimizerState fresh(std::size_t length, double step_size, double beta1 = 0.9,
                              double beta2 = 0.999, double epsilon = 1e-8);
};

/// Pure form: returns updated copies. Throws NumericError (and changes
/// nothing) if the gradient holds a non-finite entry.
std::pair<ParamSet, OptimizerState> optimizer_step(const ParamSet& params, const Gradient& grad,
                                                   const OptimizerState& state);

/// In-place form used by the trainer; same contract.
void apply_optimizer_step(ParamSet& params, const Gradient& grad, OptimizerState& state);

/// Scales `grad` so its Euclidean norm is at most `max_norm`; returns the norm
/// before clipping.
double clip_grad_norm(Gradient& grad, double max_norm);

}  // namespace asyncopt::net
