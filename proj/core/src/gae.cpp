#include "asyncopt/rollout/gae.hpp"

#include <cmath>

#include <fmt/format.h>

#include "asyncopt/error.hpp"

namespace asyncopt::rollout {

double aggregate_segment_reward(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

AdvantageBatch compute_gae(std::span<const double> segment_rewards, std::span<const int> gaps,
                           std::span<const double> values, double bootstrap_value, double gamma,
                           double lambda) {
  const auto n = segment_rewards.size();
  if (gaps.size() != n || values.size() != n) {
    throw DimensionError(fmt::format("GAE inputs disagree: {} rewards, {} gaps, {} values", n,
                                     gaps.size(), values.size()));
  }
  AdvantageBatch batch;
  batch.advantages.assign(n, 0.0);
  batch.returns.assign(n, 0.0);

  double next_value = bootstrap_value;
  double next_advantage = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    if (gaps[t] < 1) throw DimensionError(fmt::format("record {} has gap {} < 1", t, gaps[t]));
    const double gap = static_cast<double>(gaps[t]);
    const double delta = segment_rewards[t] + std::pow(gamma, gap) * next_value - values[t];
    const double advantage = delta + std::pow(gamma * lambda, gap) * next_advantage;
    batch.advantages[t] = advantage;
    batch.returns[t] = advantage + values[t];
    next_value = values[t];
    next_advantage = advantage;
  }
  batch.normalized = normalize(batch.advantages);
  return batch;
}

std::vector<double> normalize(std::span<const double> x, double eps) {
  std::vector<double> out(x.size(), 0.0);
  if (x.size() < 2) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const double scale = 1.0 / (std::sqrt(var) + eps);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) * scale;
  return out;
}

}  // namespace asyncopt::rollout
