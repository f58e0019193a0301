#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asyncopt/error.hpp"
#include "asyncopt_cli/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::string> env;
  std::optional<std::string> strategy;
  std::optional<std::string> mode;
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
  std::optional<std::int64_t> steps_per_iter;
  std::optional<std::string> out;
  std::optional<int> jobs;
  std::vector<std::string> sets;
  bool json = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "Config file of 'section.key = value' lines");
  cmd->add_option("--env", f.env, "water_filling (wf) or tool_delivery (td)");
  cmd->add_option("--mode", f.mode, "centralized or partially_centralized");
  cmd->add_option("--seeds", f.seeds, "Number of seeds");
  cmd->add_option("--seed", f.seed, "First seed");
  cmd->add_option("--iterations", f.iterations, "Training iterations");
  cmd->add_option("--steps-per-iter", f.steps_per_iter, "Low-level env steps per iteration");
  cmd->add_option("--out", f.out, "Output root (default $ASYNC_OPT_MARL_OUT or ./runs)");
  cmd->add_option("-j,--jobs", f.jobs, "Parallel runs");
  cmd->add_option("--set", f.sets, "Extra 'section.key=value' override (repeatable)");
  cmd->add_flag("--json", f.json, "Print a one-line JSON summary");
}

asyncopt::cli::RunConfig resolve(const CommonFlags& f) {
  asyncopt::cli::RunConfig config;
  if (!f.config.empty()) config = asyncopt::cli::load_run_config(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw asyncopt::ConfigError("--set expects key=value, got '" + s + "'");
    config.set(s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.env) config.set("train.env", *f.env);
  if (f.strategy) config.set("train.strategy", *f.strategy);
  if (f.mode) config.set("train.mode", *f.mode);
  if (f.iterations) config.train.iterations = *f.iterations;
  if (f.steps_per_iter) config.train.steps_per_iter = *f.steps_per_iter;
  if (f.out) config.out = *f.out;
  if (f.jobs) config.jobs = *f.jobs;
  if (f.seeds || f.seed) {
    const auto base = f.seed.value_or(config.seeds.empty() ? 0 : config.seeds.front());
    config.seeds = asyncopt::cli::seed_range(base, f.seeds.value_or(1));
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous option-based multi-agent policy gradient"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  auto* train = app.add_subcommand("train", "Train one strategy over one or more seeds");
  add_common(train, train_flags);
  train->add_option("--strategy", train_flags.strategy, "async, sync_cut, sync_wait or end2end");

  asyncopt::cli::EvalRequest eval_request;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("checkpoint", eval_request.checkpoint, "Checkpoint file")->required();
  eval->add_option("--episodes", eval_request.episodes, "Episodes to run");
  eval->add_option("--seed", eval_request.seed, "Evaluation seed");
  eval->add_flag("--greedy", eval_request.greedy, "Take the most likely option");
  eval->add_flag("--json", eval_request.json, "Print a one-line JSON result");

  CommonFlags compare_flags;
  std::string strategies;
  std::string modes;
  std::string envs;
  auto* compare = app.add_subcommand("compare", "Train every strategy x seed and merge the curves");
  add_common(compare, compare_flags);
  compare->add_option("--strategies", strategies, "Comma-separated strategies");
  compare->add_option("--modes", modes, "Comma-separated policy modes");
  compare->add_option("--envs", envs, "Comma-separated environments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      return asyncopt::cli::cmd_train(resolve(train_flags), train_flags.json, std::cout, std::cerr);
    }
    if (*eval) return asyncopt::cli::cmd_eval(eval_request, std::cout, std::cerr);
    auto config = resolve(compare_flags);
    if (!strategies.empty()) config.set("run.strategies", strategies);
    if (!modes.empty()) config.set("run.modes", modes);
    if (!envs.empty()) config.set("run.envs", envs);
    return asyncopt::cli::cmd_compare(config, compare_flags.json, std::cout, std::cerr);
  } catch (const asyncopt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
