#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "asyncopt/train/checkpoint.hpp"
#include "asyncopt/train/config.hpp"
#include "asyncopt/train/metrics.hpp"
#include "asyncopt/train/ppo.hpp"

namespace asyncopt::train {

struct TrainHooks {
  std::function<void(const IterationMetrics&, const PpoStats&)> on_iteration;
  /// Called with the initial checkpoint, every `checkpoint_every` iterations,
  /// and at the end.
  std::function<void(const Checkpoint&)> on_checkpoint;
  int checkpoint_every = 10;
};

struct TrainResult {
  std::vector<IterationMetrics> metrics;
  Checkpoint final;
};

/// Fresh checkpoint at iteration 0 for `config`.
Checkpoint initial_checkpoint(const TrainConfig& config);

/// Runs `config.iterations` collect / GAE / update rounds. Errors are
/// rethrown as Error prefixed with the failing iteration.
TrainResult train(const TrainConfig& config, const TrainHooks& hooks = {});

struct EvalResult {
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> returns;
};

/// Runs the frozen policy for `episodes` episodes. Throws DimensionError if
/// the checkpoint's nets do not fit its environment.
EvalResult evaluate(const Checkpoint& checkpoint, int episodes, bool greedy, std::uint64_t seed);

}  // namespace asyncopt::train
