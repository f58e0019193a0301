#include "asyncopt/train/config.hpp"

#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "asyncopt/parse.hpp"

namespace asyncopt::train {

namespace {

std::vector<int> parse_widths(const std::string& key, const std::string& value) {
  std::vector<int> widths;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const int w = parse_number<int>(key, item);
    if (w < 1) throw ConfigError(fmt::format("field '{}': layer widths must be >= 1", key));
    widths.push_back(w);
  }
  return widths;
}

std::string format_double(double x) { return fmt::format("{}", x); }

}  // namespace

void TrainConfig::set(const std::string& key, const std::string& value) {
  if (key.rfind("env.", 0) == 0) {
    env_params[key.substr(4)] = value;
    return;
  }
  if (key == "env") env = envs::canonical_env_id(value);
  else if (key == "strategy") strategy = options::parse_strategy(value);
  else if (key == "mode") mode = policy::parse_policy_mode(value);
  else if (key == "gamma") gamma = parse_number<double>(key, value);
  else if (key == "lambda") lambda = parse_number<double>(key, value);
  else if (key == "clip_ratio") clip_ratio = parse_number<double>(key, value);
  else if (key == "epochs") epochs = parse_number<int>(key, value);
  else if (key == "minibatches") minibatches = parse_number<int>(key, value);
  else if (key == "entropy_coef") entropy_coef = parse_number<double>(key, value);
  else if (key == "value_coef") value_coef = parse_number<double>(key, value);
  else if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
  else if (key == "max_grad_norm") max_grad_norm = parse_number<double>(key, value);
  else if (key == "normalize_advantages") normalize_advantages = parse_bool(key, value);
  else if (key == "vanilla_pg") vanilla_pg = parse_bool(key, value);
  else if (key == "steps_per_iter") steps_per_iter = parse_number<std::int64_t>(key, value);
  else if (key == "iterations") iterations = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "hidden") network.hidden = parse_widths(key, value);
  else if (key == "activation") network.activation = net::activation_from_string(value);
  else throw ConfigError(fmt::format("unknown training key '{}'", key));
}

void TrainConfig::validate() const {
  const auto fail = [](const char* field, const std::string& why) {
    throw ConfigError(fmt::format("field '{}': {}", field, why));
  };
  envs::canonical_env_id(env);
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma", "must lie in [0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda", "must lie in [0, 1]");
  if (!(clip_ratio > 0.0)) fail("clip_ratio", "must be > 0");
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (minibatches < 1) fail("minibatches", "must be >= 1");
  if (entropy_coef < 0.0) fail("entropy_coef", "must be >= 0");
  if (value_coef < 0.0) fail("value_coef", "must be >= 0");
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (!(max_grad_norm > 0.0)) fail("max_grad_norm", "must be > 0");
  if (steps_per_iter < 1) fail("steps_per_iter", "must be >= 1");
  if (iterations < 0) fail("iterations", "must be >= 0");
  if (network.hidden.empty()) fail("hidden", "needs at least one layer");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out{
      {"env", env},
      {"strategy", std::string(options::to_string(strategy))},
      {"mode", std::string(policy::to_string(mode))},
      {"gamma", format_double(gamma)},
      {"lambda", format_double(lambda)},
      {"clip_ratio", format_double(clip_ratio)},
      {"epochs", std::to_string(epochs)},
      {"minibatches", std::to_string(minibatches)},
      {"entropy_coef", format_double(entropy_coef)},
      {"value_coef", format_double(value_coef)},
      {"learning_rate", format_double(learning_rate)},
      {"max_grad_norm", format_double(max_grad_norm)},
      {"normalize_advantages", normalize_advantages ? "true" : "false"},
      {"vanilla_pg", vanilla_pg ? "true" : "false"},
      {"steps_per_iter", std::to_string(steps_per_iter)},
      {"iterations", std::to_string(iterations)},
      {"seed", std::to_string(seed)},
      {"hidden", fmt::format("{}", fmt::join(network.hidden, ","))},
      {"activation", net::to_string(network.activation)},
  };
  for (const auto& [key, value] : env_params) out.emplace_back("env." + key, value);
  return out;
}

}  // namespace asyncopt::train
