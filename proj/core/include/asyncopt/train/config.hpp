#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/options/option.hpp"
#include "asyncopt/policy/actor_critic.hpp"

namespace asyncopt::train {

struct TrainConfig {
  std::string env = "tool_delivery";
  envs::EnvParams env_params;
  options::ExecutionStrategy strategy = options::ExecutionStrategy::AsyncContinue;
  policy::PolicyMode mode = policy::PolicyMode::Centralized;

  double gamma = 0.99;
  double lambda = 0.95;
  double clip_ratio = 0.2;
  int epochs = 4;
  int minibatches = 4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double learning_rate = 3e-4;
  double max_grad_norm = 0.5;
  bool normalize_advantages = true;
  /// Plain likelihood-ratio gradient (log pi * A) instead of the clipped surrogate.
  bool vanilla_pg = false;

  /// Low-level environment steps collected per iteration (whole episodes).
  std::int64_t steps_per_iter = 2000;
  int iterations = 50;
  std::uint64_t seed = 0;

  policy::NetworkConfig network;

  /// Sets one field from text; throws ConfigError naming the key on failure.
  void set(const std::string& key, const std::string& value);
  /// Every field as (key, value) text, accepted back by `set`. Env
  /// parameters appear as "env.<name>".
  std::vector<std::pair<std::string, std::string>> entries() const;
  void validate() const;

  options::OptionSet option_set() const {
    return strategy == options::ExecutionStrategy::End2End ? options::OptionSet::Primitive
                                                           : options::OptionSet::Macro;
  }
};

}  // namespace asyncopt::train
