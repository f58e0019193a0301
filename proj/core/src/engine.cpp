#include "asyncopt/options/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "asyncopt/log.hpp"

namespace asyncopt::options {

std::string_view to_string(ExecutionStrategy strategy) {
  switch (strategy) {
    case ExecutionStrategy::SyncCut:
      return "sync_cut";
    case ExecutionStrategy::SyncWait:
      return "sync_wait";
    case ExecutionStrategy::AsyncContinue:
      return "async";
    case ExecutionStrategy::End2End:
      return "end2end";
  }
  return "unknown";
}

ExecutionStrategy parse_strategy(std::string_view name) {
  if (name == "async" || name == "async_continue") return ExecutionStrategy::AsyncContinue;
  if (name == "sync_cut") return ExecutionStrategy::SyncCut;
  if (name == "sync_wait") return ExecutionStrategy::SyncWait;
  if (name == "end2end") return ExecutionStrategy::End2End;
  throw ConfigError(fmt::format(
      "unknown strategy '{}' (expected async, sync_cut, sync_wait or end2end)", name));
}

bool DecisionSet::is_deciding(int agent) const {
  return std::find(deciding.begin(), deciding.end(), agent) != deciding.end();
}

std::optional<DecisionSet> compute_decision_set(ExecutionStrategy strategy,
                                                const std::vector<bool>& finished,
                                                std::int64_t step) {
  const int n = static_cast<int>(finished.size());
  const bool any = std::any_of(finished.begin(), finished.end(), [](bool f) { return f; });
  const bool all = std::all_of(finished.begin(), finished.end(), [](bool f) { return f; });

  DecisionSet set;
  set.step = step;
  switch (strategy) {
    case ExecutionStrategy::End2End:
      for (int i = 0; i < n; ++i) set.deciding.push_back(i);
      return set;
    case ExecutionStrategy::AsyncContinue:
      if (!any) return std::nullopt;
      for (int i = 0; i < n; ++i) {
        (finished[static_cast<std::size_t>(i)] ? set.deciding : set.continuing).push_back(i);
      }
      return set;
    case ExecutionStrategy::SyncCut:
      if (!any) return std::nullopt;
      for (int i = 0; i < n; ++i) set.deciding.push_back(i);
      return set;
    case ExecutionStrategy::SyncWait:
      if (!all) return std::nullopt;
      for (int i = 0; i < n; ++i) set.deciding.push_back(i);
      return set;
  }
  return std::nullopt;
}

bool check_termination(const MultiAgentEnv& env, int agent, const OngoingOption& ongoing) {
  return env.goal_reached(agent, ongoing) ||
         ongoing.elapsed >= env.max_duration(agent, ongoing.option_id);
}

LowLevelStep advance_low_level(MultiAgentEnv& env, std::span<OngoingOption> ongoing,
                               const std::vector<bool>& idle) {
  const int n = env.num_agents();
  if (static_cast<int>(ongoing.size()) != n || static_cast<int>(idle.size()) != n) {
    throw DimensionError(fmt::format("expected {} agents, got {} options and {} idle flags", n,
                                     ongoing.size(), idle.size()));
  }
  LowLevelStep out;
  out.actions.resize(static_cast<std::size_t>(n));
  out.terminated.assign(static_cast<std::size_t>(n), false);
  out.forced.assign(static_cast<std::size_t>(n), false);

  std::vector<bool> already_done(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (idle[ui]) {
      out.actions[ui] = env.noop_action(i);
      continue;
    }
    if (!ongoing[ui].active()) {
      throw Error(fmt::format("agent {} has no ongoing option", i));
    }
    if (env.goal_reached(i, ongoing[ui])) {
      already_done[ui] = true;
      out.actions[ui] = env.noop_action(i);
    } else {
      out.actions[ui] = env.inner_action(i, ongoing[ui]);
    }
  }

  out.result = env.step(out.actions);

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (idle[ui]) continue;
    auto& option = ongoing[ui];
    ++option.elapsed;
    if (already_done[ui] || env.goal_reached(i, option)) {
      out.terminated[ui] = true;
    } else if (option.elapsed >= env.max_duration(i, option.option_id)) {
      out.terminated[ui] = true;
      out.forced[ui] = true;
      log_warning(fmt::format("{}: agent {} option '{}' hit its {}-step cap and was terminated",
                              env.id(), i, env.option_name(i, option.option_id),
                              env.max_duration(i, option.option_id)));
    }
  }
  return out;
}

OptionScheduler::OptionScheduler(ExecutionStrategy strategy, int num_agents)
    : strategy_(strategy),
      ongoing_(static_cast<std::size_t>(num_agents)),
      finished_(static_cast<std::size_t>(num_agents), true) {}

void OptionScheduler::reset() {
  std::fill(ongoing_.begin(), ongoing_.end(), OngoingOption{});
  std::fill(finished_.begin(), finished_.end(), true);
  step_ = 0;
}

std::optional<DecisionSet> OptionScheduler::decision_point() const {
  return compute_decision_set(strategy_, finished_, step_);
}

void OptionScheduler::start(MultiAgentEnv& env, int agent, int option, std::int64_t step) {
  const auto ui = static_cast<std::size_t>(agent);
  if (!env.can_initiate(agent, option)) {
    throw Error(fmt::format("{}: option '{}' cannot be initiated by agent {} at step {}",
                            env.id(), env.option_name(agent, option), agent, step));
  }
  if (ongoing_[ui].active() && !finished_[ui]) ++interruptions_;
  ongoing_[ui] = OngoingOption{option, step, 0};
  finished_[ui] = false;
  env.on_option_start(agent, option);
}

LowLevelStep OptionScheduler::advance(MultiAgentEnv& env) {
  const auto n = finished_.size();
  const std::vector<bool> idle = finished_;
  auto out = advance_low_level(env, ongoing_, idle);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.terminated[i]) finished_[i] = true;
    if (out.forced[i]) ++forced_;
  }
  ++step_;
  return out;
}

}  // namespace asyncopt::options
