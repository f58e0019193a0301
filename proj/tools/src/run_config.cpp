#include "asyncopt_cli/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/error.hpp"
#include "asyncopt/parse.hpp"

namespace asyncopt::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string default_output_root() {
  if (const char* env = std::getenv("ASYNC_OPT_MARL_OUT"); env && *env) return env;
  return "runs";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
  if (count < 1) throw ConfigError("field 'seeds': must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    throw ConfigError(fmt::format("key '{}' needs a section prefix (train., env. or run.)", key));
  }
  const auto section = key.substr(0, dot);
  const auto name = key.substr(dot + 1);
  if (section == "train") {
    train.set(name, value);
  } else if (section == "env") {
    train.set("env." + name, value);
  } else if (section == "run") {
    if (name == "out") out = value;
    else if (name == "seeds") {
      seeds.clear();
      for (const auto& s : split_list(value)) seeds.push_back(parse_number<std::uint64_t>(key, s));
      if (seeds.empty()) throw ConfigError("field 'run.seeds': empty list");
    } else if (name == "checkpoint_every") checkpoint_every = parse_number<int>(key, value);
    else if (name == "jobs") jobs = parse_number<int>(key, value);
    else if (name == "envs") envs = split_list(value);
    else if (name == "strategies") strategies = split_list(value);
    else if (name == "modes") modes = split_list(value);
    else throw ConfigError(fmt::format("unknown key '{}'", key));
  } else {
    throw ConfigError(fmt::format("unknown section '{}' in key '{}'", section, key));
  }
}

void RunConfig::validate() const {
  train.validate();
  // Env parameters are checked by building the environment once.
  envs::make_env(train.env, train.env_params, train.option_set());
  if (jobs < 1) throw ConfigError("field 'run.jobs': must be >= 1");
  if (seeds.empty()) throw ConfigError("field 'run.seeds': empty list");
  for (const auto& e : envs) envs::canonical_env_id(e);
  for (const auto& s : strategies) options::parse_strategy(s);
  for (const auto& m : modes) policy::parse_policy_mode(m);
}

void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", origin, number));
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw ConfigError(fmt::format("{}:{}: {}", origin, number, e.what()));
    }
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig config;
  apply_config_text(config, buffer.str(), path);
  return config;
}

}  // namespace asyncopt::cli
