#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "asyncopt/options/engine.hpp"
#include "asyncopt/options/env.hpp"
#include "asyncopt/policy/actor_critic.hpp"
#include "asyncopt/rng.hpp"
#include "asyncopt/rollout/records.hpp"

namespace asyncopt::rollout {

/// Per-head network inputs at the current step: environment features plus,
/// for every agent, a one-hot of its ongoing option if it is continuing
/// (zeros if it is deciding). Centralized: one input over all agents'
/// features. Partially centralized: one input per agent over its own
/// features.
std::vector<std::vector<double>> build_head_inputs(const options::MultiAgentEnv& env,
                                                   policy::PolicyMode mode,
                                                   const std::vector<options::OngoingOption>& ongoing,
                                                   const std::vector<bool>& continuing);

/// Input widths `build_head_inputs` produces for this env and mode.
std::vector<int> head_input_sizes(const options::MultiAgentEnv& env, policy::PolicyMode mode);

/// Everything an observer sees after one low-level step.
struct StepTrace {
  std::int64_t k = 0;
  /// Decision point taken at k before stepping, if any.
  std::optional<options::DecisionSet> decision;
  /// Options running during step k (after any new starts).
  std::vector<options::OngoingOption> ongoing;
  options::LowLevelStep step;
  std::int64_t interruptions = 0;
};

struct CollectOptions {
  options::ExecutionStrategy strategy = options::ExecutionStrategy::AsyncContinue;
  double gamma = 0.99;
  /// Keep collecting whole episodes until at least this many low-level steps.
  std::int64_t min_steps = 1;
  /// Choose the most likely option instead of sampling.
  bool greedy = false;
  std::function<void(const StepTrace&)> on_step;
};

struct CollectResult {
  std::vector<OptionTrajectory> trajectories;
  std::int64_t low_level_steps = 0;
  std::int64_t decision_points = 0;
  std::int64_t interruptions = 0;
  std::int64_t forced_terminations = 0;
};

/// Runs one episode from `env.reset(seed)`.
OptionTrajectory collect_episode(options::MultiAgentEnv& env, const policy::ActorCritic& policy,
                                 const CollectOptions& options, std::uint64_t seed, Rng& rng,
                                 CollectResult* stats = nullptr);

/// Runs whole episodes until `options.min_steps` low-level steps have been
/// taken. Episode seeds are drawn from `rng`.
CollectResult collect(options::MultiAgentEnv& env, const policy::ActorCritic& policy,
                      const CollectOptions& options, Rng& rng);

}  // namespace asyncopt::rollout
