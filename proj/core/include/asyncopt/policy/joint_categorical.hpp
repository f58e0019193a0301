#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "asyncopt/rng.hpp"

namespace asyncopt::policy {

/// Categorical distribution over the product option space
/// |O^1| x ... x |O^N|, stored as normalized log-probabilities.
///
/// Cells are flattened row-major: agent 0 is the slowest-varying axis and the
/// last agent the fastest, so for counts [2, 2] the order is
/// (0,0), (0,1), (1,0), (1,1). An empty `counts` is a single certain cell.
struct JointCategorical {
  std::vector<double> log_probs;
  std::vector<int> counts;

  std::size_t size() const { return log_probs.size(); }
  int num_agents() const { return static_cast<int>(counts.size()); }

  std::vector<double> probabilities() const;
  std::size_t stride(int axis) const;
  std::size_t flat_index(std::span<const int> per_agent) const;
  std::vector<int> unravel(std::size_t flat) const;
};

/// Agent index -> option id held fixed (the continuing agents' ongoing
/// options).
using ConditionAssignment = std::map<int, int>;

std::size_t cell_count(std::span<const int> counts);

/// Numerically stable log(sum(exp(x))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Softmax over raw network output. Throws DimensionError unless the output
/// length equals the product of `counts`.
JointCategorical logits_to_joint(std::span<const double> logits, std::vector<int> counts);

/// Renormalized slice of `joint` consistent with `fixed`, as a distribution
/// over the remaining agents in increasing index order. Throws NumericError
/// ("conditioning on measure-zero event") if the slice mass is below 1e-12.
JointCategorical condition(const JointCategorical& joint, const ConditionAssignment& fixed);

/// Distribution of the listed agents (any order; result axes follow
/// increasing agent index) with every other axis summed out.
JointCategorical marginal(const JointCategorical& joint, std::span<const int> agents);

/// Removes cells whose per-axis option is marked unavailable and
/// renormalizes. `available[a][o]` refers to axis a of `dist`.
JointCategorical restrict_to(const JointCategorical& dist,
                             const std::vector<std::vector<bool>>& available);

/// Draws a flat cell index.
std::size_t sample(const JointCategorical& dist, Rng& rng);

/// Highest-probability cell; ties go to the lowest index.
std::size_t argmax(const JointCategorical& dist);

/// Natural log of the cell's probability. Throws NumericError for a cell of
/// probability zero.
double log_prob(const JointCategorical& dist, std::size_t choice);

double entropy(const JointCategorical& dist);

}  // namespace asyncopt::policy
