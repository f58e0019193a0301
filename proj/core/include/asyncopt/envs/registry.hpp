#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "asyncopt/options/env.hpp"

namespace asyncopt::envs {

using EnvParams = std::map<std::string, std::string>;

/// Canonical id for an env name or alias ("wf", "td"); throws ConfigError
/// for unknown names.
std::string canonical_env_id(const std::string& name);

std::vector<std::string> registered_envs();

/// Builds an environment with `params` applied over the defaults. Unknown
/// parameter keys are rejected.
std::unique_ptr<options::MultiAgentEnv> make_env(const std::string& name,
                                                 const EnvParams& params = {},
                                                 options::OptionSet set = options::OptionSet::Macro);

}  // namespace asyncopt::envs
