#pragma once

#include <span>
#include <vector>

#include "asyncopt/net/mlp.hpp"
#include "asyncopt/policy/conditional.hpp"
#include "asyncopt/rng.hpp"

namespace asyncopt::policy {

struct NetworkConfig {
  std::vector<int> hidden = {64, 64};
  net::Activation activation = net::Activation::Tanh;
  double hidden_gain = 1.0;
  double policy_output_gain = 0.01;
  double value_output_gain = 1.0;
};

/// Option-selection nets and critics. Centralized mode has a single head
/// (index 0) over the joint input; partially centralized mode has one head
/// per agent over that agent's local input. Every actor emits the full joint
/// option table; every critic a scalar.
struct ActorCritic {
  PolicyMode mode = PolicyMode::Centralized;
  std::vector<int> option_counts;
  std::vector<net::ParamSet> actors;
  std::vector<net::ParamSet> critics;

  /// `head_input_sizes` has one entry (centralized) or one per agent.
  static ActorCritic create(PolicyMode mode, std::vector<int> option_counts,
                            std::span<const int> head_input_sizes, const NetworkConfig& config,
                            Rng& rng);

  int num_heads() const { return static_cast<int>(actors.size()); }
  int num_agents() const { return static_cast<int>(option_counts.size()); }
  int input_size(int head) const { return actors.at(static_cast<std::size_t>(head)).input_size(); }

  std::vector<double> logits(int head, std::span<const double> input) const;
  double value(int head, std::span<const double> input) const;

  /// Throws DimensionError naming the first mismatch between this set of
  /// nets and the expected counts/input sizes.
  void check_compatible(PolicyMode expected_mode, std::span<const int> expected_counts,
                        std::span<const int> expected_inputs) const;
};

}  // namespace asyncopt::policy
