#include "asyncopt/policy/actor_critic.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "asyncopt/error.hpp"

namespace asyncopt::policy {

ActorCritic ActorCritic::create(PolicyMode mode, std::vector<int> option_counts,
                                std::span<const int> head_input_sizes, const NetworkConfig& config,
                                Rng& rng) {
  const std::size_t heads =
      mode == PolicyMode::Centralized ? 1 : option_counts.size();
  if (head_input_sizes.size() != heads) {
    throw DimensionError(fmt::format("{} mode needs {} head input sizes, got {}", to_string(mode),
                                     heads, head_input_sizes.size()));
  }
  ActorCritic ac;
  ac.mode = mode;
  ac.option_counts = std::move(option_counts);
  const int table = static_cast<int>(cell_count(ac.option_counts));
  for (std::size_t h = 0; h < heads; ++h) {
    std::vector<int> widths{head_input_sizes[h]};
    widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
    widths.push_back(table);
    ac.actors.push_back(net::make_mlp(widths, config.activation, config.hidden_gain,
                                      config.policy_output_gain, rng));
    widths.back() = 1;
    ac.critics.push_back(net::make_mlp(widths, config.activation, config.hidden_gain,
                                       config.value_output_gain, rng));
  }
  return ac;
}

std::vector<double> ActorCritic::logits(int head, std::span<const double> input) const {
  return net::forward(actors.at(static_cast<std::size_t>(head)), input);
}

double ActorCritic::value(int head, std::span<const double> input) const {
  return net::forward(critics.at(static_cast<std::size_t>(head)), input).front();
}

void ActorCritic::check_compatible(PolicyMode expected_mode, std::span<const int> expected_counts,
                                   std::span<const int> expected_inputs) const {
  if (mode != expected_mode) {
    throw DimensionError(fmt::format("policy mode mismatch: expected {}, checkpoint has {}",
                                     to_string(expected_mode), to_string(mode)));
  }
  if (!std::equal(option_counts.begin(), option_counts.end(), expected_counts.begin(),
                  expected_counts.end())) {
    throw DimensionError(fmt::format("option counts mismatch: expected [{}], checkpoint has [{}]",
                                     fmt::join(expected_counts, ","),
                                     fmt::join(option_counts, ",")));
  }
  if (static_cast<std::size_t>(num_heads()) != expected_inputs.size() ||
      critics.size() != actors.size()) {
    throw DimensionError(fmt::format("expected {} policy heads, checkpoint has {}",
                                     expected_inputs.size(), num_heads()));
  }
  const auto table = static_cast<int>(cell_count(option_counts));
  for (int h = 0; h < num_heads(); ++h) {
    const auto& actor = actors[static_cast<std::size_t>(h)];
    const auto& critic = critics[static_cast<std::size_t>(h)];
    const int want = expected_inputs[static_cast<std::size_t>(h)];
    if (actor.input_size() != want || critic.input_size() != want) {
      throw DimensionError(fmt::format("head {} input width mismatch: expected {}, checkpoint has "
                                       "{} (actor) / {} (critic)",
                                       h, want, actor.input_size(), critic.input_size()));
    }
    if (actor.output_size() != table || critic.output_size() != 1) {
      throw DimensionError(fmt::format("head {} output width mismatch: expected {} logits and 1 "
                                       "value, checkpoint has {} / {}",
                                       h, table, actor.output_size(), critic.output_size()));
    }
  }
}

}  // namespace asyncopt::policy
