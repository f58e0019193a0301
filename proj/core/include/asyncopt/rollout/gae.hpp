#pragma once

#include <span>
#include <vector>

namespace asyncopt::rollout {

/// Discounted sum of the low-level rewards of one segment between decision
/// points: sum_j gamma^j * rewards[j].
double aggregate_segment_reward(std::span<const double> rewards, double gamma);

struct AdvantageBatch {
  std::vector<double> advantages;
  /// TD(lambda) return targets: advantage + value.
  std::vector<double> returns;
  /// Advantages shifted and scaled to zero mean and unit standard deviation.
  std::vector<double> normalized;
};

/// Generalized advantage estimation over decision points separated by
/// variable low-level gaps (semi-MDP discounting):
///
///   delta_t = R_t + gamma^gap_t * V_{t+1} - V_t
///   A_t     = delta_t + (gamma * lambda)^gap_t * A_{t+1}
///
/// where V_{T} is `bootstrap_value` (0 for a terminal state).
AdvantageBatch compute_gae(std::span<const double> segment_rewards, std::span<const int> gaps,
                           std::span<const double> values, double bootstrap_value, double gamma,
                           double lambda);

/// Returns (x - mean) / (std + eps). A single element maps to 0.
std::vector<double> normalize(std::span<const double> x, double eps = 1e-8);

}  // namespace asyncopt::rollout
