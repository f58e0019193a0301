#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>

#include "asyncopt/options/env.hpp"

namespace asyncopt::envs {

// Two Turtlebots (agents 0, 1) shuttle tools from the Fetchbot's desk to a
// human at the workshop; the Fetchbot (agent 2) searches tools and passes
// them over. Locations lie on a line: WS at 0, desk at ws_desk, TR at
// ws_desk + tr_desk.
struct ToolDeliveryConfig {
  int ws_desk = 4;
  int tr_desk = 8;
  // Steps a Turtlebot spends stowing a tool after the hand-over.
  int get_tool_dwell = 2;
  int search_steps = 6;
  int horizon = 300;
  // -1: the stage-to-tool mapping follows the run seed.
  std::int64_t task_seed = -1;

  void set(const std::string& key, const std::string& value);
  void validate() const;
};

// Found tools wait on the Fetchbot's desk until passed to a Turtlebot.
enum class ToolStatus { Unsearched, Found, Carried };

struct ToolDeliveryState {
  int stage = 0;
  std::array<int, 4> stage_tool{};
  std::array<ToolStatus, 3> tools{};
  // Found tools on the desk, oldest first.
  std::deque<int> desk;
  std::array<int, 2> position{};
  std::array<int, 2> carrying{{-1, -1}};
  // Stowing steps done since the hand-over, per Turtlebot.
  std::array<int, 2> desk_wait{};
  int search_tool = -1;
  int search_progress = 0;
  int step = 0;
  int ws = 0;
  int desk_cell = 0;
  int tr = 0;
};

class ToolDeliveryEnv final : public options::TabledOptionEnv<ToolDeliveryState> {
 public:
  static constexpr int kFetch = 2;

  enum TurtleAction : int { kTbNoop = 0, kTbToWs = 1, kTbToTr = 2, kTbToDesk = 3, kTbWait = 4 };
  enum FetchAction : int { kFNoop = 0, kSearch0 = 1, kPass0 = 4 };

  static constexpr double kStepCost = -1.0;
  static constexpr double kDropPenalty = -10.0;
  static constexpr double kDeliveryReward = 100.0;

  explicit ToolDeliveryEnv(ToolDeliveryConfig config = {},
                           options::OptionSet set = options::OptionSet::Macro);

  std::string id() const override { return "tool_delivery"; }
  int num_agents() const override { return 3; }
  std::string agent_name(int agent) const override;

  void reset(std::uint64_t seed) override;
  options::StepResult step(std::span<const int> actions) override;
  int step_count() const override { return state_.step; }
  int horizon() const override { return config_.horizon; }

  int num_primitive_actions(int agent) const override { return agent == kFetch ? 6 : 5; }
  int noop_action(int /*agent*/) const override { return 0; }

  // Turtlebot: location one-hot [WS, TR, desk, transit], stage one-hot,
  // carried tool one-hot, tools on the desk. Fetchbot: tools on the desk,
  // per-Turtlebot waiting-at-desk flag.
  std::vector<double> observe(int agent) const override;
  int observation_size(int agent) const override { return agent == kFetch ? 3 : 12; }

  void on_option_start(int agent, int option) override;
  void set_task_seed(std::uint64_t seed) override;

  std::unique_ptr<options::MultiAgentEnv> clone() const override;

  const ToolDeliveryState& state() const override { return state_; }
  ToolDeliveryState& mutable_state() { return state_; }
  const ToolDeliveryConfig& config() const { return config_; }
  const std::array<int, 4>& stage_tools() const { return stage_tool_; }

 private:
  void build_tables();
  bool waiting(int turtle) const;

  ToolDeliveryConfig config_;
  ToolDeliveryState state_;
  std::array<int, 4> stage_tool_{};
};

}  // namespace asyncopt::envs
