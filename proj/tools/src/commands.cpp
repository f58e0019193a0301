#include "asyncopt_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/error.hpp"
#include "asyncopt/train/trainer.hpp"

namespace asyncopt::cli {

namespace fs = std::filesystem;

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  for (double x : xs) r.std += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(r.std / static_cast<double>(xs.size()));
  return r;
}

std::string output_root(const RunConfig& config) {
  return config.out.empty() ? default_output_root() : config.out;
}

struct RunOutcome {
  std::vector<train::IterationMetrics> metrics;
  double final_reward = 0.0;
  std::string error;
};

// Trains one seed into its own run directory.
RunOutcome run_one(const RunConfig& config, const train::TrainConfig& run) {
  RunOutcome outcome;
  try {
    const fs::path dir = run_directory(config, run);
    fs::create_directories(dir / "checkpoints");
    {
      std::ofstream snapshot(dir / "config.txt");
      for (const auto& [key, value] : run.entries()) {
        const bool env_key = key.rfind("env.", 0) == 0;
        snapshot << (env_key ? key : "train." + key) << " = " << value << '\n';
      }
      snapshot << "run.seeds = " << run.seed << '\n';
    }
    std::ofstream(dir / "seed.txt") << run.seed << '\n';

    std::ofstream metrics_file(dir / "metrics.csv");
    if (!metrics_file) throw Error(fmt::format("cannot write {}", (dir / "metrics.csv").string()));
    train::write_metrics_header(metrics_file);

    train::TrainHooks hooks;
    hooks.checkpoint_every = config.checkpoint_every;
    hooks.on_iteration = [&](const train::IterationMetrics& m, const train::PpoStats&) {
      train::write_metrics_row(metrics_file, m);
      metrics_file.flush();
    };
    hooks.on_checkpoint = [&](const train::Checkpoint& c) {
      train::save_checkpoint((dir / "checkpoints" / fmt::format("iter_{:04d}.json", c.iteration)).string(), c);
    };
    auto result = train::train(run, hooks);
    train::save_checkpoint((dir / "final.json").string(), result.final);
    outcome.final_reward = train::final_reward(result.metrics);
    outcome.metrics = std::move(result.metrics);
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

// Runs tasks 0..n-1 on up to `jobs` threads.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& task) {
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

std::string run_directory(const RunConfig& config, const train::TrainConfig& run) {
  return (fs::path(output_root(config)) / run.env /
          fmt::format("{}_{}", options::to_string(run.strategy), policy::to_string(run.mode)) /
          fmt::format("seed_{}", run.seed))
      .string();
}

int cmd_train(const RunConfig& config, bool json, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<RunOutcome> outcomes(config.seeds.size());
  parallel_for(config.seeds.size(), config.jobs, [&](std::size_t i) {
    auto run = config.train;
    run.seed = config.seeds[i];
    outcomes[i] = run_one(config, run);
  });

  std::vector<double> finals;
  bool failed = false;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      err << fmt::format("seed {}: {}\n", config.seeds[i], outcomes[i].error);
      failed = true;
      continue;
    }
    finals.push_back(outcomes[i].final_reward);
    if (!json) {
      out << fmt::format("seed {}: final reward {:.3f} over {} iterations\n", config.seeds[i],
                         outcomes[i].final_reward, outcomes[i].metrics.size());
    }
  }
  const auto summary = mean_std(finals);
  if (json) {
    nlohmann::json j{{"env", config.train.env},
                     {"strategy", std::string(options::to_string(config.train.strategy))},
                     {"mode", std::string(policy::to_string(config.train.mode))},
                     {"seeds", config.seeds},
                     {"final_rewards", finals},
                     {"mean", summary.mean},
                     {"std", summary.std}};
    out << j.dump() << '\n';
  } else {
    out << fmt::format("final reward over {} seeds: {:.3f} ± {:.3f}\n", finals.size(), summary.mean,
                       summary.std);
  }
  return failed ? 1 : 0;
}

int cmd_eval(const EvalRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const auto checkpoint = train::load_checkpoint(request.checkpoint);
    const auto result = train::evaluate(checkpoint, request.episodes, request.greedy, request.seed);
    if (request.json) {
      nlohmann::json j{{"checkpoint", request.checkpoint}, {"episodes", request.episodes},
                       {"greedy", request.greedy},         {"seed", request.seed},
                       {"mean", result.mean},              {"std", result.std}};
      out << j.dump() << '\n';
    } else {
      out << fmt::format("mean reward {:.4f} ± {:.4f} over {} episodes ({})\n", result.mean,
                         result.std, request.episodes, request.greedy ? "greedy" : "stochastic");
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_compare(const RunConfig& config, bool json, std::ostream& out, std::ostream& err) {
  struct Cell {
    train::TrainConfig run;
    RunOutcome outcome;
  };
  std::vector<Cell> cells;
  try {
    config.validate();
    const auto env_list = config.envs.empty() ? std::vector<std::string>{config.train.env} : config.envs;
    const auto mode_list = config.modes.empty()
                               ? std::vector<std::string>{std::string(policy::to_string(config.train.mode))}
                               : config.modes;
    if (config.strategies.empty()) throw ConfigError("field 'run.strategies': empty list");
    for (const auto& e : env_list) {
      for (const auto& m : mode_list) {
        for (const auto& s : config.strategies) {
          for (auto seed : config.seeds) {
            auto run = config.train;
            if (envs::canonical_env_id(e) != envs::canonical_env_id(run.env)) run.env_params.clear();
            run.env = envs::canonical_env_id(e);
            run.mode = policy::parse_policy_mode(m);
            run.strategy = options::parse_strategy(s);
            run.seed = seed;
            cells.push_back(Cell{run, {}});
          }
        }
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  std::mutex progress;
  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    cells[i].outcome = run_one(config, cells[i].run);
    std::lock_guard lock(progress);
    const auto& r = cells[i].run;
    if (cells[i].outcome.error.empty()) {
      err << fmt::format("[{}/{}] {} {} {} seed {}: final {:.3f}\n", i + 1, cells.size(), r.env,
                         policy::to_string(r.mode), options::to_string(r.strategy), r.seed,
                         cells[i].outcome.final_reward);
    } else {
      err << fmt::format("[{}/{}] {} {} {} seed {}: FAILED: {}\n", i + 1, cells.size(), r.env,
                         policy::to_string(r.mode), options::to_string(r.strategy), r.seed,
                         cells[i].outcome.error);
    }
  });

  const fs::path dir = fs::path(output_root(config)) / "compare";
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "compare.csv");
    csv << "env,mode,strategy,seed,iteration,env_steps,mean_reward\n";
    for (const auto& c : cells) {
      for (const auto& m : c.outcome.metrics) {
        csv << fmt::format("{},{},{},{},{},{},{}\n", c.run.env, policy::to_string(c.run.mode),
                           options::to_string(c.run.strategy), c.run.seed, m.iteration,
                           m.env_steps, m.mean_reward);
      }
    }
  }

  // One summary row per (env, mode, strategy) group, in cell order.
  struct Group {
    std::string env, mode, strategy;
    std::vector<double> finals;
    std::vector<std::string> errors;
  };
  std::vector<Group> groups;
  for (const auto& c : cells) {
    const std::string mode(policy::to_string(c.run.mode));
    const std::string strategy(options::to_string(c.run.strategy));
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.env == c.run.env && g.mode == mode && g.strategy == strategy;
    });
    if (it == groups.end()) {
      groups.push_back(Group{c.run.env, mode, strategy, {}, {}});
      it = std::prev(groups.end());
    }
    if (c.outcome.error.empty()) {
      it->finals.push_back(c.outcome.final_reward);
    } else {
      it->errors.push_back(fmt::format("seed {}: {}", c.run.seed, c.outcome.error));
    }
  }

  bool any_failed = false;
  nlohmann::json summary_json = nlohmann::json::array();
  {
    std::ofstream csv(dir / "summary.csv");
    csv << "env,mode,strategy,seeds_ok,seeds_failed,final_mean,final_std\n";
    if (!json) {
      out << fmt::format("{:<14} {:<22} {:<10} {:>22}\n", "env", "mode", "strategy",
                         "final reward");
    }
    for (const auto& g : groups) {
      const auto ms = mean_std(g.finals);
      any_failed = any_failed || !g.errors.empty();
      csv << fmt::format("{},{},{},{},{},{},{}\n", g.env, g.mode, g.strategy, g.finals.size(),
                         g.errors.size(), ms.mean, ms.std);
      summary_json.push_back({{"env", g.env},
                              {"mode", g.mode},
                              {"strategy", g.strategy},
                              {"seeds_ok", g.finals.size()},
                              {"seeds_failed", g.errors.size()},
                              {"final_mean", ms.mean},
                              {"final_std", ms.std}});
      if (!json) {
        out << fmt::format("{:<14} {:<22} {:<10} {:>12.3f} ± {:<8.3f}{}\n", g.env, g.mode,
                           g.strategy, ms.mean, ms.std,
                           g.errors.empty() ? "" : fmt::format("  ({} failed)", g.errors.size()));
      }
    }
  }
  if (json) out << summary_json.dump() << '\n';
  else out << fmt::format("wrote {}\n", (dir / "compare.csv").string());
  return any_failed ? 1 : 0;
}

}  // namespace asyncopt::cli
