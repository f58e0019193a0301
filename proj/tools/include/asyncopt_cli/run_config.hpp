#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asyncopt/train/config.hpp"

namespace asyncopt::cli {

/// Output root when neither --out nor a config value is given:
/// $ASYNC_OPT_MARL_OUT if set, else "runs".
std::string default_output_root();

struct RunConfig {
  train::TrainConfig train;
  std::string out;
  std::vector<std::uint64_t> seeds{0};
  int checkpoint_every = 10;
  int jobs = 1;
  // compare only
  std::vector<std::string> envs;
  std::vector<std::string> strategies{"async", "sync_cut", "sync_wait", "end2end"};
  std::vector<std::string> modes;

  /// Applies one "section.key = value" entry. Sections: train, env, run.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

/// Parses a config file: one "section.key = value" per line, '#' comments.
/// Errors name the file, line, and field.
RunConfig load_run_config(const std::string& path);
void apply_config_text(RunConfig& config, const std::string& text, const std::string& origin);

/// N consecutive seeds starting at `base`.
std::vector<std::uint64_t> seed_range(std::uint64_t base, int count);

std::vector<std::string> split_list(const std::string& text);

}  // namespace asyncopt::cli
