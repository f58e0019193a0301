#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace asyncopt::train {

struct IterationMetrics {
  int iteration = 0;
  /// Cumulative low-level environment steps at the end of the iteration.
  std::int64_t env_steps = 0;
  std::int64_t decision_points = 0;
  double mean_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_log_prob = 0.0;
  std::int64_t low_level_steps = 0;
  int episodes = 0;
};

inline constexpr const char* kMetricsHeader =
    "iteration,env_steps,decision_points,mean_reward,policy_loss,value_loss,entropy";

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const IterationMetrics& m);
void write_metrics_csv(const std::string& path, std::span<const IterationMetrics> metrics);
std::vector<IterationMetrics> read_metrics_csv(const std::string& path);

/// Mean of `mean_reward` over the last `window` iterations (all if fewer).
double final_reward(std::span<const IterationMetrics> metrics, int window = 5);

}  // namespace asyncopt::train
