#pragma once

#include <ostream>
#include <string>

#include "asyncopt_cli/run_config.hpp"

namespace asyncopt::cli {

/// Directory a single (env, strategy, mode, seed) run writes into.
std::string run_directory(const RunConfig& config, const train::TrainConfig& run);

int cmd_train(const RunConfig& config, bool json, std::ostream& out, std::ostream& err);

struct EvalRequest {
  std::string checkpoint;
  int episodes = 20;
  std::uint64_t seed = 0;
  bool greedy = false;
  bool json = false;
};

int cmd_eval(const EvalRequest& request, std::ostream& out, std::ostream& err);

/// Trains every env x mode x strategy x seed cell and writes compare.csv and
/// summary.csv under <out>/compare. Failed cells are reported and skipped.
int cmd_compare(const RunConfig& config, bool json, std::ostream& out, std::ostream& err);

}  // namespace asyncopt::cli
