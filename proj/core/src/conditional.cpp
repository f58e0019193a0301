#include "asyncopt/policy/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "asyncopt/error.hpp"

namespace asyncopt::policy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kMinConditioningLogMass = std::log(1e-12);

struct SliceMap {
  // Joint cells consistent with `fixed`, and the target cell each maps to.
  std::vector<std::size_t> cells;
  std::vector<std::size_t> target_of;
  std::vector<int> target_counts;
  std::size_t target_size = 1;
};

SliceMap build_slice(std::span<const int> counts, const ConditionalQuery& query) {
  const int n = static_cast<int>(counts.size());
  for (const auto& [agent, option] : query.fixed) {
    if (agent < 0 || agent >= n) {
      throw DimensionError(fmt::format("fixed agent {} out of range for {} agents", agent, n));
    }
    if (option < 0 || option >= counts[static_cast<std::size_t>(agent)]) {
      throw DimensionError(fmt::format("fixed option {} invalid for agent {} with {} options",
                                       option, agent, counts[static_cast<std::size_t>(agent)]));
    }
  }
  std::vector<int> target_axis(static_cast<std::size_t>(n), -1);
  for (std::size_t t = 0; t < query.targets.size(); ++t) {
    const int agent = query.targets[t];
    if (agent < 0 || agent >= n) {
      throw DimensionError(fmt::format("target agent {} out of range for {} agents", agent, n));
    }
    if (query.fixed.count(agent) != 0) {
      throw DimensionError(fmt::format("agent {} is both fixed and a target", agent));
    }
    if (t > 0 && query.targets[t - 1] >= agent) {
      throw DimensionError("target agents must be strictly increasing");
    }
    target_axis[static_cast<std::size_t>(agent)] = static_cast<int>(t);
  }
  if (!query.available.empty() && query.available.size() != query.targets.size()) {
    throw DimensionError(fmt::format("availability mask covers {} agents, query has {} targets",
                                     query.available.size(), query.targets.size()));
  }

  SliceMap map;
  for (int agent : query.targets) {
    map.target_counts.push_back(counts[static_cast<std::size_t>(agent)]);
  }
  std::vector<std::size_t> target_stride(query.targets.size(), 1);
  for (std::size_t t = query.targets.size(); t-- > 1;) {
    target_stride[t - 1] = target_stride[t] * static_cast<std::size_t>(map.target_counts[t]);
  }
  map.target_size = cell_count(map.target_counts);

  // Walk every joint cell with an odometer over the per-agent indices.
  const std::size_t total = cell_count(counts);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    bool consistent = true;
    for (const auto& [agent, option] : query.fixed) {
      if (idx[static_cast<std::size_t>(agent)] != option) {
        consistent = false;
        break;
      }
    }
    if (consistent) {
      std::size_t t_flat = 0;
      for (int a = 0; a < n; ++a) {
        const int axis = target_axis[static_cast<std::size_t>(a)];
        if (axis >= 0) {
          t_flat += target_stride[static_cast<std::size_t>(axis)] *
                    static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
        }
      }
      map.cells.push_back(flat);
      map.target_of.push_back(t_flat);
    }
    for (int a = n - 1; a >= 0; --a) {
      auto& i = idx[static_cast<std::size_t>(a)];
      if (++i < counts[static_cast<std::size_t>(a)]) break;
      i = 0;
    }
  }
  return map;
}

bool target_available(const ConditionalQuery& query, const SliceMap& map, std::size_t t_flat) {
  if (query.available.empty()) return true;
  std::size_t rem = t_flat;
  for (std::size_t t = query.targets.size(); t-- > 0;) {
    const auto count = static_cast<std::size_t>(map.target_counts[t]);
    const auto option = rem % count;
    rem /= count;
    const auto& mask = query.available[t];
    if (!mask.empty()) {
      if (mask.size() != count) {
        throw DimensionError(fmt::format("availability mask for target {} has {} entries, agent "
                                         "has {} options",
                                         query.targets[t], mask.size(), count));
      }
      if (!mask[option]) return false;
    }
  }
  return true;
}

struct TargetScores {
  SliceMap map;
  std::vector<double> scores;  // per target cell, -inf if masked
  double normalizer = kNegInf;
};

TargetScores score_targets(std::span<const double> logits, std::span<const int> counts,
                           const ConditionalQuery& query) {
  if (logits.size() != cell_count(counts)) {
    throw DimensionError(fmt::format("joint head emits {} logits, option counts imply {}",
                                     logits.size(), cell_count(counts)));
  }
  TargetScores out;
  out.map = build_slice(counts, query);
  const auto& map = out.map;

  std::vector<double> slice_logits;
  slice_logits.reserve(map.cells.size());
  for (auto cell : map.cells) slice_logits.push_back(logits[cell]);
  if (!query.fixed.empty()) {
    const double slice_mass = log_sum_exp(slice_logits) - log_sum_exp(logits);
    if (!(slice_mass >= kMinConditioningLogMass)) {
      throw NumericError(fmt::format(
          "conditioning on measure-zero event (slice mass {:.3e} < 1e-12)", std::exp(slice_mass)));
    }
  }

  std::vector<double> maxv(map.target_size, kNegInf);
  for (std::size_t s = 0; s < map.cells.size(); ++s) {
    auto& m = maxv[map.target_of[s]];
    m = std::max(m, slice_logits[s]);
  }
  std::vector<double> sums(map.target_size, 0.0);
  for (std::size_t s = 0; s < map.cells.size(); ++s) {
    const double m = maxv[map.target_of[s]];
    if (m != kNegInf) sums[map.target_of[s]] += std::exp(slice_logits[s] - m);
  }
  out.scores.resize(map.target_size);
  for (std::size_t t = 0; t < map.target_size; ++t) {
    const bool open = target_available(query, map, t);
    out.scores[t] = (open && maxv[t] != kNegInf) ? maxv[t] + std::log(sums[t]) : kNegInf;
  }
  out.normalizer = log_sum_exp(out.scores);
  if (out.normalizer == kNegInf) {
    throw NumericError("conditional distribution has no available option with positive mass");
  }
  return out;
}

}  // namespace

std::string_view to_string(PolicyMode mode) {
  return mode == PolicyMode::Centralized ? "centralized" : "partially_centralized";
}

PolicyMode parse_policy_mode(std::string_view name) {
  if (name == "centralized") return PolicyMode::Centralized;
  if (name == "partially_centralized" || name == "partial") return PolicyMode::PartiallyCentralized;
  throw ConfigError(fmt::format(
      "unknown policy mode '{}' (expected centralized or partially_centralized)", name));
}

JointCategorical conditional_distribution(std::span<const double> logits,
                                          std::span<const int> counts,
                                          const ConditionalQuery& query) {
  auto scored = score_targets(logits, counts, query);
  JointCategorical dist;
  dist.counts = scored.map.target_counts;
  dist.log_probs.resize(scored.scores.size());
  for (std::size_t t = 0; t < scored.scores.size(); ++t) {
    dist.log_probs[t] = scored.scores[t] - scored.normalizer;
  }
  return dist;
}

ConditionalEvaluation evaluate_conditional(std::span<const double> logits,
                                           std::span<const int> counts,
                                           const ConditionalQuery& query, std::size_t choice) {
  auto scored = score_targets(logits, counts, query);
  const auto& map = scored.map;
  if (choice >= map.target_size) {
    throw DimensionError(fmt::format("choice {} out of range for {} target cells", choice,
                                     map.target_size));
  }

  ConditionalEvaluation eval;
  eval.distribution.counts = map.target_counts;
  eval.distribution.log_probs.resize(map.target_size);
  double h = 0.0;
  for (std::size_t t = 0; t < map.target_size; ++t) {
    const double lp = scored.scores[t] - scored.normalizer;
    eval.distribution.log_probs[t] = lp;
    if (lp != kNegInf) h -= std::exp(lp) * lp;
  }
  eval.entropy = h;
  eval.log_prob = eval.distribution.log_probs[choice];
  if (eval.log_prob == kNegInf) {
    throw NumericError(fmt::format("chosen cell {} has probability zero", choice));
  }

  eval.grad_log_prob.assign(logits.size(), 0.0);
  eval.grad_entropy.assign(logits.size(), 0.0);
  for (std::size_t s = 0; s < map.cells.size(); ++s) {
    const auto t = map.target_of[s];
    const double score = scored.scores[t];
    if (score == kNegInf) continue;
    const auto cell = map.cells[s];
    // Share of target cell t's mass carried by this joint cell.
    const double within = std::exp(logits[cell] - score);
    const double lp = eval.distribution.log_probs[t];
    const double p = std::exp(lp);
    eval.grad_log_prob[cell] = (t == choice ? within : 0.0) - p * within;
    eval.grad_entropy[cell] = -p * (lp + h) * within;
  }
  return eval;
}

double partially_centralized_prob(int agent, std::span<const double> own_head_logits,
                                  std::span<const int> counts, const ConditionAssignment& fixed,
                                  int choice) {
  if (fixed.count(agent) != 0) return 1.0;
  ConditionalQuery query{fixed, {agent}, {}};
  return std::exp(
      evaluate_conditional(own_head_logits, counts, query, static_cast<std::size_t>(choice))
          .log_prob);
}

}  // namespace asyncopt::policy
