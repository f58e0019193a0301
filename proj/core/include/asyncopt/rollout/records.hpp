#pragma once

#include <cstdint>
#include <vector>

#include "asyncopt/options/option.hpp"
#include "asyncopt/policy/conditional.hpp"

namespace asyncopt::rollout {

/// One decision point of an option-level trajectory.
///
/// Per-head vectors have one entry in centralized mode and one per agent in
/// partially centralized mode.
struct DecisionRecord {
  std::int64_t k = 0;
  options::DecisionSet decision;
  /// Per agent: the newly chosen option if deciding, the ongoing one if not.
  std::vector<int> options;
  /// Per agent: initiation-set mask at k (consulted for deciding agents).
  std::vector<std::vector<bool>> available;
  /// Network inputs, per head.
  std::vector<std::vector<double>> inputs;
  /// Conditional log-probability of the choice at collection time, per head
  /// (0 for a head whose agent is continuing).
  std::vector<double> log_probs;
  /// Critic estimates V(z_k), per head.
  std::vector<double> values;
  /// Discounted reward accumulated until the next decision point.
  double segment_reward = 0.0;
  /// Low-level steps until the next decision point.
  int gap = 0;

  /// Continuing agents held at their ongoing options.
  policy::ConditionAssignment fixed() const;

  /// Whether the head scores a choice at this record. Centralized heads are
  /// always active; a per-agent head is active iff its agent is deciding.
  bool head_active(int head, policy::PolicyMode mode) const;

  /// The conditional query head `head` is scored with.
  policy::ConditionalQuery query(int head, policy::PolicyMode mode) const;

  /// Flat index of the recorded choice within `query(head, mode)`'s targets.
  std::size_t choice(int head, policy::PolicyMode mode) const;
};

struct OptionTrajectory {
  std::vector<DecisionRecord> records;
  /// V(z_T) per head for a horizon cut, 0 for a terminal state.
  std::vector<double> bootstrap_values;
  bool terminal = false;
  /// The environment raised an error; records end at the last complete one.
  bool faulted = false;
  /// Undiscounted sum of low-level rewards.
  double episode_return = 0.0;
  std::vector<double> low_level_rewards;
  std::int64_t low_level_steps = 0;
};

}  // namespace asyncopt::rollout
