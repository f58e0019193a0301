#include "asyncopt/train/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "asyncopt/error.hpp"
#include "asyncopt/net/serialize.hpp"

namespace asyncopt::train {

using nlohmann::json;

std::string to_json_string(const Checkpoint& c) {
  json config = json::object();
  for (const auto& [key, value] : c.config.entries()) config[key] = value;
  json j{{"format", "asyncopt-checkpoint"},
         {"version", kCheckpointVersion},
         {"config", std::move(config)},
         {"iteration", c.iteration},
         {"rollout_rng", c.rollout_rng},
         {"shuffle_rng", c.shuffle_rng},
         {"mode", std::string(policy::to_string(c.policy.mode))},
         {"option_counts", c.policy.option_counts},
         {"actors", c.policy.actors},
         {"critics", c.policy.critics},
         {"actor_optimizers", c.actor_opt},
         {"critic_optimizers", c.critic_opt}};
  return j.dump(1);
}

Checkpoint checkpoint_from_json_string(const std::string& text) {
  Checkpoint c;
  try {
    const auto j = json::parse(text);
    if (j.at("format").get<std::string>() != "asyncopt-checkpoint") {
      throw Error("not an asyncopt checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw Error(fmt::format("unsupported checkpoint version {} (expected {})", version,
                              kCheckpointVersion));
    }
    for (const auto& [key, value] : j.at("config").items()) c.config.set(key, value.get<std::string>());
    c.iteration = j.at("iteration").get<int>();
    c.rollout_rng = j.at("rollout_rng").get<std::string>();
    c.shuffle_rng = j.at("shuffle_rng").get<std::string>();
    c.policy.mode = policy::parse_policy_mode(j.at("mode").get<std::string>());
    c.policy.option_counts = j.at("option_counts").get<std::vector<int>>();
    c.policy.actors = j.at("actors").get<std::vector<net::ParamSet>>();
    c.policy.critics = j.at("critics").get<std::vector<net::ParamSet>>();
    c.actor_opt = j.at("actor_optimizers").get<std::vector<net::OptimizerState>>();
    c.critic_opt = j.at("critic_optimizers").get<std::vector<net::OptimizerState>>();
  } catch (const json::exception& e) {
    throw Error(fmt::format("corrupt checkpoint: {}", e.what()));
  }
  if (c.actor_opt.size() != c.policy.actors.size() ||
      c.critic_opt.size() != c.policy.critics.size()) {
    throw Error("corrupt checkpoint: optimizer count does not match network count");
  }
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  const auto text = to_json_string(checkpoint);
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write checkpoint '{}'", path));
    out << text;
    if (!out) throw Error(fmt::format("failed writing checkpoint '{}'", path));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(fmt::format("cannot move checkpoint into place at '{}'", path));
  }
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open checkpoint '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return checkpoint_from_json_string(buffer.str());
  } catch (const Error& e) {
    throw Error(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace asyncopt::train
