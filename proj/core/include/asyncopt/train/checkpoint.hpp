#pragma once

#include <string>
#include <vector>

#include "asyncopt/net/adam.hpp"
#include "asyncopt/policy/actor_critic.hpp"
#include "asyncopt/train/config.hpp"

namespace asyncopt::train {

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to resume or evaluate a run. Serialized as JSON with
/// doubles in shortest round-trip form, so save/load is bit-exact.
struct Checkpoint {
  TrainConfig config;
  int iteration = 0;
  std::string rollout_rng;
  std::string shuffle_rng;
  policy::ActorCritic policy;
  std::vector<net::OptimizerState> actor_opt;
  std::vector<net::OptimizerState> critic_opt;
};

std::string to_json_string(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json_string(const std::string& text);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
/// Throws Error for a missing, unreadable, corrupt, or wrong-version file.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace asyncopt::train
