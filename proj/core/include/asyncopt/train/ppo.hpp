#pragma once

#include <cstdint>
#include <vector>

#include "asyncopt/net/adam.hpp"
#include "asyncopt/policy/actor_critic.hpp"
#include "asyncopt/rng.hpp"
#include "asyncopt/rollout/records.hpp"

namespace asyncopt::train {

/// One decision record with per-head advantage and return targets.
struct Sample {
  const rollout::DecisionRecord* record = nullptr;
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct PpoBatch {
  std::vector<Sample> samples;
};

/// Per-head SMDP GAE over every trajectory, optionally normalizing the
/// advantages of all scored (record, head) pairs together.
PpoBatch build_batch(const std::vector<rollout::OptionTrajectory>& trajectories,
                     policy::PolicyMode mode, double gamma, double lambda, bool normalize);

struct PpoSettings {
  double clip_ratio = 0.2;
  int epochs = 4;
  int minibatches = 4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  bool vanilla_pg = false;
  /// Skip the critic (for isolating the policy step in tests).
  bool update_critic = true;
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_log_prob = 0.0;
  std::int64_t policy_samples = 0;
  /// Largest |recomputed - stored| conditional log-prob before any update.
  double on_policy_gap = 0.0;
  /// Partially centralized: (record, head) pairs whose agent was continuing,
  /// the smallest probability assigned to their held option, and the summed absolute
  /// logit gradient they produced.
  std::int64_t continuing_samples = 0;
  double continuing_prob_min = 1.0;
  double continuing_prob_max = 1.0;
  double continuing_grad_abs = 0.0;
  bool aborted = false;
};

/// Clipped-surrogate update on the conditional log-probabilities, recomputed
/// from each record's stored query, plus critic regression to the returns.
/// A non-finite loss or gradient restores the parameters and optimizer
/// states held on entry and sets `aborted`.
PpoStats ppo_update(policy::ActorCritic& policy, std::vector<net::OptimizerState>& actor_opt,
                    std::vector<net::OptimizerState>& critic_opt, const PpoBatch& batch,
                    const PpoSettings& settings, Rng& rng);

}  // namespace asyncopt::train
