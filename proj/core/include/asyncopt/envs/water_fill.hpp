#pragma once

#include <array>
#include <span>
#include <string>

#include "asyncopt/options/env.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt::envs {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

int manhattan(Cell a, Cell b);

/// Water Filling on a grid: a fast drone (agent 0) that can only scout and a
/// slow vehicle (agent 1) that scouts and refills three leaking jars.
struct WaterFillConfig {
  int width = 12;
  int height = 12;
  int drone_speed = 4;
  int vehicle_speed = 1;
  double w_max = 1.0;
  /// Per-jar mean decay per step is drawn uniformly in
  /// [decay_mean_min, decay_mean_max] * w_max at every reset.
  double decay_mean_min = 0.005;
  double decay_mean_max = 0.02;
  /// Decay standard deviation as a fraction of the jar's mean.
  double decay_std_ratio = 0.3;
  double initial_level_min = 0.5;
  double initial_level_max = 1.0;
  /// Agents within this Manhattan distance of a jar refresh its shared level.
  int scout_radius = 1;
  int horizon = 400;
  std::array<Cell, 3> jars{{{1, 1}, {10, 2}, {3, 10}}};
  Cell drone_start{6, 6};
  Cell vehicle_start{5, 6};

  /// Sets one field from its textual value; throws ConfigError for unknown
  /// keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

struct WaterFillState {
  int width = 0;
  int height = 0;
  Cell drone;
  Cell vehicle;
  /// True water levels w(s; c).
  std::array<double, 3> level{};
  /// Shared last-known levels and steps since each was refreshed.
  std::array<double, 3> known{};
  std::array<int, 3> staleness{};
  std::array<double, 3> decay_mean{};
  std::array<Cell, 3> jars{};
  /// Jar the vehicle filled on the last step, or -1.
  int last_fill = -1;
  int step = 0;
};

/// r(s) = sum_c (-1 / (w(s; c) + 0.001) + 1).
double wf_reward(std::span<const double> levels);

class WaterFillEnv final : public options::TabledOptionEnv<WaterFillState> {
 public:
  static constexpr int kDrone = 0;
  static constexpr int kVehicle = 1;

  // Primitive action ids shared by both agents.
  enum Action : int {
    kNoop = 0,
    kUp = 1,
    kDown = 2,
    kLeft = 3,
    kRight = 4,
    kFill = 5,          // vehicle only: refill the jar at the current cell
    kTowardJar0 = 6,    // kTowardJar0 + c: full-speed greedy step toward jar c
  };

  explicit WaterFillEnv(WaterFillConfig config = {},
                        options::OptionSet set = options::OptionSet::Macro);

  std::string id() const override { return "water_filling"; }
  int num_agents() const override { return 2; }
  std::string agent_name(int agent) const override;

  void reset(std::uint64_t seed) override;
  options::StepResult step(std::span<const int> actions) override;
  int step_count() const override { return state_.step; }
  int horizon() const override { return config_.horizon; }

  int num_primitive_actions(int /*agent*/) const override { return kTowardJar0 + 3; }
  int noop_action(int /*agent*/) const override { return kNoop; }

  /// Own cell (normalized), shared last-known levels (fraction of w_max),
  /// and steps since each level was refreshed.
  std::vector<double> observe(int agent) const override;
  int observation_size(int /*agent*/) const override { return 8; }

  std::unique_ptr<options::MultiAgentEnv> clone() const override;

  const WaterFillState& state() const override { return state_; }
  WaterFillState& mutable_state() { return state_; }
  const WaterFillConfig& config() const { return config_; }

  /// Position after a greedy Manhattan move of up to `speed` cells toward
  /// `target`, x axis first.
  static Cell step_toward(Cell from, Cell target, int speed);

 private:
  void build_tables();
  Cell clamp(Cell c) const;

  WaterFillConfig config_;
  WaterFillState state_;
  Rng rng_;
};

}  // namespace asyncopt::envs
