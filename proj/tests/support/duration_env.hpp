#pragma once

#include <memory>
#include <string>
#include <vector>

#include "asyncopt/options/env.hpp"

namespace testenv {

struct DurationState {
  int step = 0;
};

// Every option simply runs for a fixed number of steps. Rewards follow a
// given per-step list (default 1 each step); an optional fault step makes
// `step` throw.
class DurationEnv final : public asyncopt::options::TabledOptionEnv<DurationState> {
 public:
  DurationEnv(std::vector<std::vector<int>> durations, int horizon,
              std::vector<double> rewards = {}, int fault_at = -1)
      : TabledOptionEnv(asyncopt::options::OptionSet::Macro),
        durations_(std::move(durations)),
        horizon_(horizon),
        rewards_(std::move(rewards)),
        fault_at_(fault_at) {
    for (std::size_t a = 0; a < durations_.size(); ++a) {
      std::vector<Option> table;
      for (std::size_t o = 0; o < durations_[a].size(); ++o) {
        const int d = durations_[a][o];
        table.push_back(Option{static_cast<int>(o), "wait" + std::to_string(d), nullptr,
                               [d](const DurationState&, int, const asyncopt::options::OngoingOption& g) {
                                 return g.elapsed >= d;
                               },
                               [](const DurationState&, int, const asyncopt::options::OngoingOption&) {
                                 return 0;
                               },
                               d + 5});
      }
      tables_.push_back(std::move(table));
    }
  }

  std::string id() const override { return "duration"; }
  int num_agents() const override { return static_cast<int>(durations_.size()); }
  std::string agent_name(int agent) const override { return "agent" + std::to_string(agent); }
  void reset(std::uint64_t) override { state_ = {}; }
  asyncopt::options::StepResult step(std::span<const int>) override {
    if (state_.step == fault_at_) throw asyncopt::Error("injected fault");
    const double r = rewards_.empty() ? 1.0 : rewards_[static_cast<std::size_t>(state_.step)];
    ++state_.step;
    return {r, false, state_.step >= horizon_};
  }
  int step_count() const override { return state_.step; }
  int horizon() const override { return horizon_; }
  int num_primitive_actions(int) const override { return 1; }
  int noop_action(int) const override { return 0; }
  std::vector<double> observe(int) const override {
    return {static_cast<double>(state_.step) / horizon_};
  }
  int observation_size(int) const override { return 1; }
  std::unique_ptr<asyncopt::options::MultiAgentEnv> clone() const override {
    return std::make_unique<DurationEnv>(*this);
  }
  const DurationState& state() const override { return state_; }

 private:
  std::vector<std::vector<int>> durations_;
  int horizon_;
  std::vector<double> rewards_;
  int fault_at_;
  DurationState state_;
};

}  // namespace testenv
