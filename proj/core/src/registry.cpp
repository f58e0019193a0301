#include "asyncopt/envs/registry.hpp"

#include <fmt/format.h>

#include "asyncopt/envs/tool_delivery.hpp"
#include "asyncopt/envs/water_fill.hpp"

namespace asyncopt::envs {

std::string canonical_env_id(const std::string& name) {
  if (name == "water_filling" || name == "water_fill" || name == "wf") return "water_filling";
  if (name == "tool_delivery" || name == "td") return "tool_delivery";
  throw ConfigError(fmt::format("unknown environment '{}' (expected water_filling or tool_delivery)",
                                name));
}

std::vector<std::string> registered_envs() { return {"water_filling", "tool_delivery"}; }

std::unique_ptr<options::MultiAgentEnv> make_env(const std::string& name, const EnvParams& params,
                                                 options::OptionSet set) {
  const auto id = canonical_env_id(name);
  if (id == "water_filling") {
    WaterFillConfig config;
    for (const auto& [key, value] : params) config.set(key, value);
    return std::make_unique<WaterFillEnv>(config, set);
  }
  ToolDeliveryConfig config;
  for (const auto& [key, value] : params) config.set(key, value);
  return std::make_unique<ToolDeliveryEnv>(config, set);
}

}  // namespace asyncopt::envs
