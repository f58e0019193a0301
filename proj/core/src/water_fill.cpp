#include "asyncopt/envs/water_fill.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "asyncopt/parse.hpp"

namespace asyncopt::envs {

using options::OngoingOption;

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double wf_reward(std::span<const double> levels) {
  double r = 0.0;
  for (double w : levels) r += -1.0 / (w + 0.001) + 1.0;
  return r;
}

void WaterFillConfig::set(const std::string& key, const std::string& value) {
  if (key == "width") width = parse_number<int>(key, value);
  else if (key == "height") height = parse_number<int>(key, value);
  else if (key == "drone_speed") drone_speed = parse_number<int>(key, value);
  else if (key == "vehicle_speed") vehicle_speed = parse_number<int>(key, value);
  else if (key == "w_max") w_max = parse_number<double>(key, value);
  else if (key == "decay_mean_min") decay_mean_min = parse_number<double>(key, value);
  else if (key == "decay_mean_max") decay_mean_max = parse_number<double>(key, value);
  else if (key == "decay_std_ratio") decay_std_ratio = parse_number<double>(key, value);
  else if (key == "initial_level_min") initial_level_min = parse_number<double>(key, value);
  else if (key == "initial_level_max") initial_level_max = parse_number<double>(key, value);
  else if (key == "scout_radius") scout_radius = parse_number<int>(key, value);
  else if (key == "horizon") horizon = parse_number<int>(key, value);
  else throw ConfigError(fmt::format("water_filling: unknown parameter '{}'", key));
}

void WaterFillConfig::validate() const {
  if (width < 2 || height < 2) throw ConfigError("water_filling: grid must be at least 2x2");
  if (drone_speed < 1 || vehicle_speed < 1) throw ConfigError("water_filling: speeds must be >= 1");
  if (!(w_max > 0.0)) throw ConfigError("water_filling: w_max must be positive");
  if (decay_mean_min < 0.0 || decay_mean_max < decay_mean_min) {
    throw ConfigError("water_filling: need 0 <= decay_mean_min <= decay_mean_max");
  }
  if (decay_std_ratio < 0.0) throw ConfigError("water_filling: decay_std_ratio must be >= 0");
  if (initial_level_min < 0.0 || initial_level_max > 1.0 || initial_level_max < initial_level_min) {
    throw ConfigError("water_filling: need 0 <= initial_level_min <= initial_level_max <= 1");
  }
  if (horizon < 1) throw ConfigError("water_filling: horizon must be >= 1");
  const auto inside = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; };
  for (const auto& jar : jars) {
    if (!inside(jar)) throw ConfigError("water_filling: jar outside the grid");
  }
  if (!inside(drone_start) || !inside(vehicle_start)) {
    throw ConfigError("water_filling: start cell outside the grid");
  }
}

Cell WaterFillEnv::step_toward(Cell from, Cell target, int speed) {
  Cell c = from;
  int budget = speed;
  const int dx = target.x - c.x;
  const int mx = std::min(budget, std::abs(dx));
  c.x += dx > 0 ? mx : -mx;
  budget -= mx;
  const int dy = target.y - c.y;
  const int my = std::min(budget, std::abs(dy));
  c.y += dy > 0 ? my : -my;
  return c;
}

WaterFillEnv::WaterFillEnv(WaterFillConfig config, options::OptionSet set)
    : TabledOptionEnv(set), config_(config) {
  config_.validate();
  build_tables();
  reset(0);
}

std::string WaterFillEnv::agent_name(int agent) const {
  return agent == kDrone ? "drone" : "vehicle";
}

Cell WaterFillEnv::clamp(Cell c) const {
  return Cell{std::clamp(c.x, 0, config_.width - 1), std::clamp(c.y, 0, config_.height - 1)};
}

void WaterFillEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = WaterFillState{};
  state_.width = config_.width;
  state_.height = config_.height;
  state_.drone = config_.drone_start;
  state_.vehicle = config_.vehicle_start;
  state_.jars = config_.jars;
  std::uniform_real_distribution<double> mean_dist(config_.decay_mean_min, config_.decay_mean_max);
  std::uniform_real_distribution<double> level_dist(config_.initial_level_min,
                                                    config_.initial_level_max);
  for (std::size_t c = 0; c < 3; ++c) {
    state_.decay_mean[c] = mean_dist(rng_) * config_.w_max;
    state_.level[c] = level_dist(rng_) * config_.w_max;
    state_.known[c] = state_.level[c];
    state_.staleness[c] = 0;
  }
}

options::StepResult WaterFillEnv::step(std::span<const int> actions) {
  if (actions.size() != 2) {
    throw DimensionError(fmt::format("water_filling expects 2 actions, got {}", actions.size()));
  }
  for (int agent = 0; agent < 2; ++agent) {
    const int a = actions[static_cast<std::size_t>(agent)];
    if (a < 0 || a >= num_primitive_actions(agent) || (agent == kDrone && a == kFill)) {
      throw Error(fmt::format("water_filling: invalid action {} for {}", a, agent_name(agent)));
    }
  }

  const auto move = [&](Cell pos, int action, int speed) {
    switch (action) {
      case kUp:
        return clamp(Cell{pos.x, pos.y - speed});
      case kDown:
        return clamp(Cell{pos.x, pos.y + speed});
      case kLeft:
        return clamp(Cell{pos.x - speed, pos.y});
      case kRight:
        return clamp(Cell{pos.x + speed, pos.y});
      default:
        break;
    }
    if (action >= kTowardJar0) {
      return step_toward(pos, state_.jars[static_cast<std::size_t>(action - kTowardJar0)], speed);
    }
    return pos;
  };
  state_.drone = move(state_.drone, actions[kDrone], config_.drone_speed);
  state_.vehicle = move(state_.vehicle, actions[kVehicle], config_.vehicle_speed);

  state_.last_fill = -1;
  if (actions[kVehicle] == kFill) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (state_.vehicle == state_.jars[c]) {
        state_.level[c] = config_.w_max;
        state_.last_fill = static_cast<int>(c);
      }
    }
  }

  for (std::size_t c = 0; c < 3; ++c) {
    const double mean = state_.decay_mean[c];
    double drop = mean;
    if (config_.decay_std_ratio > 0.0 && mean > 0.0) {
      std::normal_distribution<double> noise(mean, config_.decay_std_ratio * mean);
      drop = std::max(0.0, noise(rng_));
    }
    state_.level[c] = std::clamp(state_.level[c] - drop, 0.0, config_.w_max);
  }

  for (std::size_t c = 0; c < 3; ++c) {
    const bool seen = manhattan(state_.drone, state_.jars[c]) <= config_.scout_radius ||
                      manhattan(state_.vehicle, state_.jars[c]) <= config_.scout_radius;
    if (seen) {
      state_.known[c] = state_.level[c];
      state_.staleness[c] = 0;
    } else {
      ++state_.staleness[c];
    }
  }

  ++state_.step;
  options::StepResult result;
  result.reward = wf_reward(state_.level);
  result.truncated = state_.step >= config_.horizon;
  return result;
}

std::vector<double> WaterFillEnv::observe(int agent) const {
  const Cell pos = agent == kDrone ? state_.drone : state_.vehicle;
  std::vector<double> obs;
  obs.reserve(8);
  obs.push_back(static_cast<double>(pos.x) / (config_.width - 1));
  obs.push_back(static_cast<double>(pos.y) / (config_.height - 1));
  for (double k : state_.known) obs.push_back(k / config_.w_max);
  for (int s : state_.staleness) obs.push_back(static_cast<double>(s));
  return obs;
}

std::unique_ptr<options::MultiAgentEnv> WaterFillEnv::clone() const {
  return std::make_unique<WaterFillEnv>(*this);
}

void WaterFillEnv::build_tables() {
  using Option = options::OptionDef<WaterFillState>;
  const auto position = [](const WaterFillState& s, int agent) {
    return agent == kDrone ? s.drone : s.vehicle;
  };
  const auto one_step = [](const WaterFillState&, int, const OngoingOption& o) {
    return o.elapsed >= 1;
  };
  const auto emit = [](int action) {
    return [action](const WaterFillState&, int, const OngoingOption&) { return action; };
  };
  const int cap = (config_.width - 1) + (config_.height - 1) + 5;

  tables_.assign(2, {});
  if (option_set_ == options::OptionSet::Primitive) {
    const std::array<const char*, 6> names{"noop", "up", "down", "left", "right", "fill"};
    for (int agent = 0; agent < 2; ++agent) {
      const int n = agent == kDrone ? 5 : 6;
      for (int a = 0; a < n; ++a) {
        tables_[static_cast<std::size_t>(agent)].push_back(
            Option{a, names[static_cast<std::size_t>(a)], nullptr, one_step, emit(a), 1});
      }
    }
    return;
  }

  for (int agent = 0; agent < 2; ++agent) {
    auto& table = tables_[static_cast<std::size_t>(agent)];
    const std::array<std::pair<const char*, int>, 4> moves{
        {{"Up", kUp}, {"Down", kDown}, {"Left", kLeft}, {"Right", kRight}}};
    for (const auto& [name, action] : moves) {
      table.push_back(Option{static_cast<int>(table.size()), name, nullptr, one_step, emit(action), 1});
    }
    if (agent == kVehicle) {
      for (int c = 0; c < 3; ++c) {
        table.push_back(Option{
            static_cast<int>(table.size()), fmt::format("Fill({})", c),
            [c](const WaterFillState& s, int) { return s.vehicle == s.jars[static_cast<std::size_t>(c)]; },
            one_step, emit(kFill), 1});
      }
    }
    for (int c = 0; c < 3; ++c) {
      const auto at_jar = [c, position](const WaterFillState& s, int a) {
        return position(s, a) == s.jars[static_cast<std::size_t>(c)];
      };
      table.push_back(Option{
          static_cast<int>(table.size()), fmt::format("NavTo({})", c),
          [at_jar](const WaterFillState& s, int a) { return !at_jar(s, a); },
          [at_jar](const WaterFillState& s, int a, const OngoingOption&) { return at_jar(s, a); },
          emit(kTowardJar0 + c), cap});
    }
    if (agent == kVehicle) {
      for (int c = 0; c < 3; ++c) {
        table.push_back(Option{
            static_cast<int>(table.size()), fmt::format("NavToFill({})", c), nullptr,
            [c](const WaterFillState& s, int, const OngoingOption& o) {
              return o.elapsed >= 1 && s.last_fill == c;
            },
            [c](const WaterFillState& s, int, const OngoingOption&) {
              return s.vehicle == s.jars[static_cast<std::size_t>(c)] ? int{kFill}
                                                                       : kTowardJar0 + c;
            },
            cap + 1});
      }
    }
  }
}

}  // namespace asyncopt::envs
