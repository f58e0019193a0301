#include "asyncopt/envs/tool_delivery.hpp"

#include <fmt/format.h>

#include "asyncopt/parse.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt::envs {

using options::OngoingOption;

void ToolDeliveryConfig::set(const std::string& key, const std::string& value) {
  if (key == "ws_desk") ws_desk = parse_number<int>(key, value);
  else if (key == "tr_desk") tr_desk = parse_number<int>(key, value);
  else if (key == "get_tool_dwell") get_tool_dwell = parse_number<int>(key, value);
  else if (key == "search_steps") search_steps = parse_number<int>(key, value);
  else if (key == "horizon") horizon = parse_number<int>(key, value);
  else if (key == "task_seed") task_seed = parse_number<std::int64_t>(key, value);
  else throw ConfigError(fmt::format("tool_delivery: unknown parameter '{}'", key));
}

void ToolDeliveryConfig::validate() const {
  if (ws_desk < 1 || tr_desk < 1) throw ConfigError("tool_delivery: travel legs must be >= 1");
  if (get_tool_dwell < 1) throw ConfigError("tool_delivery: get_tool_dwell must be >= 1");
  if (search_steps < 1) throw ConfigError("tool_delivery: search_steps must be >= 1");
  if (horizon < 1) throw ConfigError("tool_delivery: horizon must be >= 1");
}

ToolDeliveryEnv::ToolDeliveryEnv(ToolDeliveryConfig config, options::OptionSet set)
    : TabledOptionEnv(set), config_(config) {
  config_.validate();
  set_task_seed(0);
  build_tables();
  reset(0);
}

void ToolDeliveryEnv::set_task_seed(std::uint64_t seed) {
  const std::uint64_t effective =
      config_.task_seed >= 0 ? static_cast<std::uint64_t>(config_.task_seed) : seed;
  Rng rng(derive_seed(effective, 0x7d));
  std::uniform_int_distribution<int> tool(0, 2);
  for (auto& t : stage_tool_) t = tool(rng);
  state_.stage_tool = stage_tool_;
}

std::string ToolDeliveryEnv::agent_name(int agent) const {
  return agent == kFetch ? "fetchbot" : fmt::format("turtlebot{}", agent);
}

void ToolDeliveryEnv::reset(std::uint64_t /*seed*/) {
  state_ = ToolDeliveryState{};
  state_.stage_tool = stage_tool_;
  state_.ws = 0;
  state_.desk_cell = config_.ws_desk;
  state_.tr = config_.ws_desk + config_.tr_desk;
  state_.position = {state_.ws, state_.ws};
}

bool ToolDeliveryEnv::waiting(int turtle) const {
  const auto t = static_cast<std::size_t>(turtle);
  return state_.position[t] == state_.desk_cell && state_.carrying[t] < 0;
}

void ToolDeliveryEnv::on_option_start(int agent, int option) {
  if (option_set_ != options::OptionSet::Macro) return;
  if (agent == kFetch) {
    // A (re)started search begins from scratch.
    state_.search_tool = -1;
    state_.search_progress = 0;
  } else {
    state_.desk_wait[static_cast<std::size_t>(agent)] = 0;
  }
  (void)option;
}

options::StepResult ToolDeliveryEnv::step(std::span<const int> actions) {
  if (actions.size() != 3) {
    throw DimensionError(fmt::format("tool_delivery expects 3 actions, got {}", actions.size()));
  }
  for (int agent = 0; agent < 3; ++agent) {
    const int a = actions[static_cast<std::size_t>(agent)];
    if (a < 0 || a >= num_primitive_actions(agent)) {
      throw Error(fmt::format("tool_delivery: invalid action {} for {}", a, agent_name(agent)));
    }
  }
  options::StepResult result;
  auto& s = state_;

  const int fa = actions[kFetch];
  if (fa >= kSearch0 && fa < kPass0) {
    const int j = fa - kSearch0;
    if (s.tools[static_cast<std::size_t>(j)] != ToolStatus::Unsearched) {
      s.search_tool = -1;
      s.search_progress = 0;
    } else {
      if (s.search_tool != j) {
        s.search_tool = j;
        s.search_progress = 0;
      }
      if (++s.search_progress >= config_.search_steps) {
        s.tools[static_cast<std::size_t>(j)] = ToolStatus::Found;
        s.desk.push_back(j);
        s.search_tool = -1;
        s.search_progress = 0;
      }
    }
  } else {
    s.search_tool = -1;
    s.search_progress = 0;
    if (fa >= kPass0 && !s.desk.empty()) {
      const int w = fa - kPass0;
      if (waiting(w)) {
        const int tool = s.desk.front();
        s.desk.pop_front();
        s.carrying[static_cast<std::size_t>(w)] = tool;
        s.tools[static_cast<std::size_t>(tool)] = ToolStatus::Carried;
      } else {
        result.reward += kDropPenalty;
      }
    }
  }

  for (std::size_t t = 0; t < 2; ++t) {
    int& pos = s.position[t];
    switch (actions[t]) {
      case kTbToWs:
        if (pos > s.ws) --pos;
        break;
      case kTbToTr:
        if (pos < s.tr) ++pos;
        break;
      case kTbToDesk:
        if (pos < s.desk_cell) ++pos;
        else if (pos > s.desk_cell) --pos;
        break;
      case kTbWait:
        if (pos == s.desk_cell && s.carrying[t] >= 0) ++s.desk_wait[t];
        break;
      default:
        break;
    }
  }

  for (std::size_t t = 0; t < 2; ++t) {
    const int tool = s.carrying[t];
    if (tool < 0 || s.position[t] != s.ws) continue;
    if (s.stage < 4 && tool == s.stage_tool[static_cast<std::size_t>(s.stage)]) {
      result.reward += kDeliveryReward;
      ++s.stage;
    }
    s.carrying[t] = -1;
    s.tools[static_cast<std::size_t>(tool)] = ToolStatus::Unsearched;
  }

  result.reward += kStepCost;
  ++s.step;
  result.terminal = s.stage >= 4;
  result.truncated = !result.terminal && s.step >= config_.horizon;
  return result;
}

std::vector<double> ToolDeliveryEnv::observe(int agent) const {
  const auto& s = state_;
  if (agent == kFetch) {
    return {static_cast<double>(s.desk.size()), waiting(0) ? 1.0 : 0.0, waiting(1) ? 1.0 : 0.0};
  }
  const auto t = static_cast<std::size_t>(agent);
  std::vector<double> obs(12, 0.0);
  const int pos = s.position[t];
  const int loc = pos == s.ws ? 0 : pos == s.tr ? 1 : pos == s.desk_cell ? 2 : 3;
  obs[static_cast<std::size_t>(loc)] = 1.0;
  obs[4 + static_cast<std::size_t>(std::min(s.stage, 3))] = 1.0;
  if (s.carrying[t] >= 0) obs[8 + static_cast<std::size_t>(s.carrying[t])] = 1.0;
  obs[11] = static_cast<double>(s.desk.size());
  return obs;
}

std::unique_ptr<options::MultiAgentEnv> ToolDeliveryEnv::clone() const {
  return std::make_unique<ToolDeliveryEnv>(*this);
}

void ToolDeliveryEnv::build_tables() {
  using Option = options::OptionDef<ToolDeliveryState>;
  const auto one_step = [](const ToolDeliveryState&, int, const OngoingOption& o) {
    return o.elapsed >= 1;
  };
  const auto emit = [](int action) {
    return [action](const ToolDeliveryState&, int, const OngoingOption&) { return action; };
  };
  const int cap = config_.ws_desk + config_.tr_desk + config_.get_tool_dwell + 5;
  const int dwell = config_.get_tool_dwell;

  tables_.assign(3, {});
  if (option_set_ == options::OptionSet::Primitive) {
    for (int agent = 0; agent < 3; ++agent) {
      for (int a = 0; a < num_primitive_actions(agent); ++a) {
        const auto name = agent == kFetch
                              ? std::array<const char*, 6>{"noop", "search0", "search1", "search2",
                                                           "pass0", "pass1"}[static_cast<std::size_t>(a)]
                              : std::array<const char*, 5>{"noop", "to_ws", "to_tr", "to_desk",
                                                           "wait"}[static_cast<std::size_t>(a)];
        tables_[static_cast<std::size_t>(agent)].push_back(
            Option{a, name, nullptr, one_step, emit(a), 1});
      }
    }
    return;
  }

  for (int turtle = 0; turtle < 2; ++turtle) {
    auto& table = tables_[static_cast<std::size_t>(turtle)];
    const auto at = [](const ToolDeliveryState& s, int a, int cell) {
      return s.position[static_cast<std::size_t>(a)] == cell;
    };
    table.push_back(Option{
        0, "GoToWS", [at](const ToolDeliveryState& s, int a) { return !at(s, a, s.ws); },
        [at](const ToolDeliveryState& s, int a, const OngoingOption&) { return at(s, a, s.ws); },
        emit(kTbToWs), cap});
    table.push_back(Option{
        1, "GoToTR", [at](const ToolDeliveryState& s, int a) { return !at(s, a, s.tr); },
        [at](const ToolDeliveryState& s, int a, const OngoingOption&) { return at(s, a, s.tr); },
        emit(kTbToTr), cap});
    table.push_back(Option{
        2, "GetTool",
        [](const ToolDeliveryState& s, int a) { return s.carrying[static_cast<std::size_t>(a)] < 0; },
        [dwell](const ToolDeliveryState& s, int a, const OngoingOption&) {
          const auto t = static_cast<std::size_t>(a);
          return s.carrying[t] >= 0 && s.desk_wait[t] >= dwell;
        },
        [at](const ToolDeliveryState& s, int a, const OngoingOption&) {
          return at(s, a, s.desk_cell) ? int{kTbWait} : int{kTbToDesk};
        },
        cap});
  }

  auto& fetch = tables_[kFetch];
  for (int j = 0; j < 3; ++j) {
    const auto unsearched = [j](const ToolDeliveryState& s) {
      return s.tools[static_cast<std::size_t>(j)] == ToolStatus::Unsearched;
    };
    fetch.push_back(Option{
        j, fmt::format("SearchTool({})", j),
        [unsearched](const ToolDeliveryState& s, int) { return unsearched(s); },
        [unsearched](const ToolDeliveryState& s, int, const OngoingOption&) { return !unsearched(s); },
        emit(kSearch0 + j), cap});
  }
  for (int w = 0; w < 2; ++w) {
    fetch.push_back(Option{3 + w, fmt::format("PassTo({})", w), nullptr, one_step,
                           emit(kPass0 + w), 1});
  }
}

}  // namespace asyncopt::envs
