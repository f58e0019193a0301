#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "asyncopt/error.hpp"
#include "asyncopt/options/option.hpp"

namespace asyncopt::options {

/// Which option table an environment exposes: the temporally-extended
/// options, or every primitive action wrapped as a one-step option.
enum class OptionSet { Macro, Primitive };

struct StepResult {
  double reward = 0.0;
  /// The task reached a terminal state (bootstrap with 0).
  bool terminal = false;
  /// The horizon was hit (bootstrap with the value estimate).
  bool truncated = false;

  bool done() const { return terminal || truncated; }
};

/// A cooperative multi-agent environment together with its option tables.
/// One instance per worker; instances share nothing.
class MultiAgentEnv {
 public:
  virtual ~MultiAgentEnv() = default;

  virtual std::string id() const = 0;
  virtual int num_agents() const = 0;
  virtual std::string agent_name(int agent) const = 0;

  virtual void reset(std::uint64_t seed) = 0;
  /// Applies one primitive action per agent.
  virtual StepResult step(std::span<const int> actions) = 0;
  virtual int step_count() const = 0;
  virtual int horizon() const = 0;

  virtual int num_primitive_actions(int agent) const = 0;
  virtual int noop_action(int agent) const = 0;

  virtual std::vector<double> observe(int agent) const = 0;
  virtual int observation_size(int agent) const = 0;

  /// Concatenation of every agent's observation.
  std::vector<double> observe_joint() const {
    std::vector<double> joint;
    for (int i = 0; i < num_agents(); ++i) {
      auto part = observe(i);
      joint.insert(joint.end(), part.begin(), part.end());
    }
    return joint;
  }

  virtual OptionSet option_set() const = 0;
  virtual int num_options(int agent) const = 0;
  virtual std::string option_name(int agent, int option) const = 0;
  virtual bool can_initiate(int agent, int option) const = 0;
  virtual bool goal_reached(int agent, const OngoingOption& ongoing) const = 0;
  virtual int inner_action(int agent, const OngoingOption& ongoing) const = 0;
  virtual int max_duration(int agent, int option) const = 0;
  /// Called when an agent starts a fresh option.
  virtual void on_option_start(int /*agent*/, int /*option*/) {}
  /// Fixes per-run task structure (episode randomness still follows reset).
  virtual void set_task_seed(std::uint64_t /*seed*/) {}

  virtual std::unique_ptr<MultiAgentEnv> clone() const = 0;

  std::vector<int> option_counts() const {
    std::vector<int> counts;
    for (int i = 0; i < num_agents(); ++i) counts.push_back(num_options(i));
    return counts;
  }
};

/// Implements the option half of MultiAgentEnv from per-agent OptionDef
/// tables over the subclass's state type.
template <class State>
class TabledOptionEnv : public MultiAgentEnv {
 public:
  using Option = OptionDef<State>;

  OptionSet option_set() const override { return option_set_; }

  int num_options(int agent) const override {
    return static_cast<int>(table(agent).size());
  }
  std::string option_name(int agent, int option) const override {
    return def(agent, option).name;
  }
  bool can_initiate(int agent, int option) const override {
    const auto& d = def(agent, option);
    return !d.initiation || d.initiation(state(), agent);
  }
  bool goal_reached(int agent, const OngoingOption& ongoing) const override {
    return def(agent, ongoing.option_id).goal(state(), agent, ongoing);
  }
  int inner_action(int agent, const OngoingOption& ongoing) const override {
    return def(agent, ongoing.option_id).inner_policy(state(), agent, ongoing);
  }
  int max_duration(int agent, int option) const override {
    return def(agent, option).max_duration;
  }

  const std::vector<Option>& table(int agent) const {
    if (agent < 0 || agent >= static_cast<int>(tables_.size())) {
      throw DimensionError("agent index " + std::to_string(agent) + " out of range");
    }
    return tables_[static_cast<std::size_t>(agent)];
  }

  virtual const State& state() const = 0;

 protected:
  explicit TabledOptionEnv(OptionSet set) : option_set_(set) {}

  const Option& def(int agent, int option) const {
    const auto& t = table(agent);
    if (option < 0 || option >= static_cast<int>(t.size())) {
      throw DimensionError("option id " + std::to_string(option) + " out of range for agent " +
                           std::to_string(agent) + " (" + std::to_string(t.size()) +
                           " options)");
    }
    return t[static_cast<std::size_t>(option)];
  }

  OptionSet option_set_;
  std::vector<std::vector<Option>> tables_;
};

}  // namespace asyncopt::options
