#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "asyncopt/policy/joint_categorical.hpp"

namespace asyncopt::policy {

/// How option-selection policies are organized across agents.
enum class PolicyMode {
  /// One net over the joint observation emits the joint option table.
  Centralized,
  /// One net per agent over its local observation, each emitting its own
  /// joint table over (own option x others' options).
  PartiallyCentralized,
};

std::string_view to_string(PolicyMode mode);
PolicyMode parse_policy_mode(std::string_view name);

/// What to read off a joint table: hold `fixed` agents at their options,
/// score the `targets` (sorted, disjoint from `fixed`), and sum out every
/// other agent. `available[t][o]`, when non-empty, masks option o of the t-th
/// target.
struct ConditionalQuery {
  ConditionAssignment fixed;
  std::vector<int> targets;
  std::vector<std::vector<bool>> available;
};

struct ConditionalEvaluation {
  /// Distribution over the target agents' product space.
  JointCategorical distribution;
  double log_prob = 0.0;
  double entropy = 0.0;
  /// d log_prob / d raw logit, one entry per joint cell.
  std::vector<double> grad_log_prob;
  /// d entropy / d raw logit, one entry per joint cell.
  std::vector<double> grad_entropy;
};

/// Conditional distribution over the query's targets given raw joint logits.
///
/// Computed in log space: the score of a target cell t is the log-sum-exp of
/// the joint logits in the slice that agrees with `fixed` and has targets at
/// t; the log-normalizer is the log-sum-exp over the whole (available) slice.
/// Throws NumericError when the slice carries less than 1e-12 of the joint
/// mass or every target cell is masked.
JointCategorical conditional_distribution(std::span<const double> logits,
                                          std::span<const int> counts,
                                          const ConditionalQuery& query);

/// Same distribution plus the log-probability of `choice` (flat index over
/// the targets), the entropy, and both their gradients with respect to the
/// raw logits.
ConditionalEvaluation evaluate_conditional(std::span<const double> logits,
                                           std::span<const int> counts,
                                           const ConditionalQuery& query, std::size_t choice);

/// Per-agent option probability in partially centralized mode: exactly 1
/// when `agent` is held fixed (its option simply continues); otherwise the
/// probability of `choice` under the agent's own joint head, marginalized to
/// (agent, fixed agents) and conditioned on `fixed`.
double partially_centralized_prob(int agent, std::span<const double> own_head_logits,
                                  std::span<const int> counts, const ConditionAssignment& fixed,
                                  int choice);

}  // namespace asyncopt::policy
