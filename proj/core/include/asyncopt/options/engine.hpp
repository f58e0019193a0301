#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "asyncopt/options/env.hpp"
#include "asyncopt/options/option.hpp"

namespace asyncopt::options {

/// Decides which agents choose new options at step `step`, given per-agent
/// flags saying whether the agent's option has finished. Returns nullopt when
/// step `step` is not a decision point.
std::optional<DecisionSet> compute_decision_set(ExecutionStrategy strategy,
                                                const std::vector<bool>& finished,
                                                std::int64_t step);

/// True iff the option's goal predicate holds or it has used up its step cap.
bool check_termination(const MultiAgentEnv& env, int agent, const OngoingOption& ongoing);

struct LowLevelStep {
  std::vector<int> actions;
  StepResult result;
  /// Option finished after this step (goal or cap).
  std::vector<bool> terminated;
  /// Subset of `terminated` caused by the step cap rather than the goal.
  std::vector<bool> forced;
};

/// Runs one low-level step: every non-idle agent emits its option's inner
/// action (an option whose goal already holds emits a no-op instead), idle
/// agents emit a no-op, the environment advances once, and terminations are
/// evaluated on the new state. `ongoing[i].elapsed` is incremented for every
/// non-idle agent.
LowLevelStep advance_low_level(MultiAgentEnv& env, std::span<OngoingOption> ongoing,
                               const std::vector<bool>& idle);

/// Per-episode option bookkeeping for one strategy: tracks what every agent
/// is running, which options have finished, and how many running options were
/// replaced before terminating.
class OptionScheduler {
 public:
  OptionScheduler(ExecutionStrategy strategy, int num_agents);

  /// Clears all options; the next decision point includes every agent.
  void reset();

  /// Decision set at the current step, or nullopt.
  std::optional<DecisionSet> decision_point() const;

  /// Starts `option` for `agent` at `step`. Counts an interruption if the
  /// agent's previous option had not terminated.
  void start(MultiAgentEnv& env, int agent, int option, std::int64_t step);

  /// Advances the environment one low-level step. Under SyncWait agents
  /// whose option finished early idle with a no-op.
  LowLevelStep advance(MultiAgentEnv& env);

  ExecutionStrategy strategy() const { return strategy_; }
  std::int64_t step() const { return step_; }
  const std::vector<OngoingOption>& ongoing() const { return ongoing_; }
  const std::vector<bool>& finished() const { return finished_; }
  std::int64_t interruptions() const { return interruptions_; }
  std::int64_t forced_terminations() const { return forced_; }

 private:
  ExecutionStrategy strategy_;
  std::vector<OngoingOption> ongoing_;
  std::vector<bool> finished_;
  std::int64_t step_ = 0;
  std::int64_t interruptions_ = 0;
  std::int64_t forced_ = 0;
};

}  // namespace asyncopt::options
