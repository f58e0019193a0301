#include "asyncopt/train/trainer.hpp"

#include <cmath>

#include <fmt/format.h>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/rollout/collector.hpp"

namespace asyncopt::train {

namespace {

std::unique_ptr<options::MultiAgentEnv> build_env(const TrainConfig& config) {
  auto env = envs::make_env(config.env, config.env_params, config.option_set());
  env->set_task_seed(config.seed);
  return env;
}

PpoSettings ppo_settings(const TrainConfig& c) {
  PpoSettings s;
  s.clip_ratio = c.clip_ratio;
  s.epochs = c.epochs;
  s.minibatches = c.minibatches;
  s.entropy_coef = c.entropy_coef;
  s.value_coef = c.value_coef;
  s.max_grad_norm = c.max_grad_norm;
  s.vanilla_pg = c.vanilla_pg;
  return s;
}

}  // namespace

Checkpoint initial_checkpoint(const TrainConfig& config) {
  config.validate();
  auto env = build_env(config);
  Checkpoint c;
  c.config = config;
  Rng init_rng(derive_seed(config.seed, 1));
  const auto inputs = rollout::head_input_sizes(*env, config.mode);
  c.policy = policy::ActorCritic::create(config.mode, env->option_counts(), inputs, config.network,
                                         init_rng);
  for (int h = 0; h < c.policy.num_heads(); ++h) {
    const auto uh = static_cast<std::size_t>(h);
    c.actor_opt.push_back(net::OptimizerState::fresh(c.policy.actors[uh].size(), config.learning_rate));
    c.critic_opt.push_back(
        net::OptimizerState::fresh(c.policy.critics[uh].size(), config.learning_rate));
  }
  c.rollout_rng = rng_state_string(Rng(derive_seed(config.seed, 2)));
  c.shuffle_rng = rng_state_string(Rng(derive_seed(config.seed, 3)));
  return c;
}

TrainResult train(const TrainConfig& config, const TrainHooks& hooks) {
  TrainResult result;
  result.final = initial_checkpoint(config);
  auto& state = result.final;
  if (hooks.on_checkpoint) hooks.on_checkpoint(state);

  auto env = build_env(config);
  Rng rollout_rng;
  Rng shuffle_rng;
  restore_rng_state(rollout_rng, state.rollout_rng);
  restore_rng_state(shuffle_rng, state.shuffle_rng);

  rollout::CollectOptions collect_opts;
  collect_opts.strategy = config.strategy;
  collect_opts.gamma = config.gamma;
  collect_opts.min_steps = config.steps_per_iter;
  const auto settings = ppo_settings(config);

  std::int64_t env_steps = 0;
  for (int it = 0; it < config.iterations; ++it) {
    try {
      const auto batch_data = rollout::collect(*env, state.policy, collect_opts, rollout_rng);
      const auto batch = build_batch(batch_data.trajectories, config.mode, config.gamma,
                                     config.lambda, config.normalize_advantages);
      const auto stats =
          ppo_update(state.policy, state.actor_opt, state.critic_opt, batch, settings, shuffle_rng);

      env_steps += batch_data.low_level_steps;
      IterationMetrics m;
      m.iteration = it;
      m.env_steps = env_steps;
      m.decision_points = batch_data.decision_points;
      m.low_level_steps = batch_data.low_level_steps;
      m.episodes = static_cast<int>(batch_data.trajectories.size());
      double total = 0.0;
      for (const auto& t : batch_data.trajectories) total += t.episode_return;
      m.mean_reward = m.episodes > 0 ? total / m.episodes : 0.0;
      m.policy_loss = stats.policy_loss;
      m.value_loss = stats.value_loss;
      m.entropy = stats.entropy;
      m.mean_log_prob = stats.mean_log_prob;
      if (!std::isfinite(m.mean_reward)) throw NumericError("non-finite mean reward");
      result.metrics.push_back(m);

      state.iteration = it + 1;
      state.rollout_rng = rng_state_string(rollout_rng);
      state.shuffle_rng = rng_state_string(shuffle_rng);
      if (hooks.on_iteration) hooks.on_iteration(m, stats);
      if (hooks.on_checkpoint && hooks.checkpoint_every > 0 &&
          state.iteration % hooks.checkpoint_every == 0 && state.iteration != config.iterations) {
        hooks.on_checkpoint(state);
      }
    } catch (const Error& e) {
      throw Error(fmt::format("iteration {}: {}", it, e.what()));
    }
  }
  if (hooks.on_checkpoint && config.iterations > 0) hooks.on_checkpoint(state);
  return result;
}

EvalResult evaluate(const Checkpoint& checkpoint, int episodes, bool greedy, std::uint64_t seed) {
  if (episodes < 1) throw ConfigError("field 'episodes': must be >= 1");
  const auto& config = checkpoint.config;
  auto env = build_env(config);
  const auto inputs = rollout::head_input_sizes(*env, config.mode);
  const auto counts = env->option_counts();
  checkpoint.policy.check_compatible(config.mode, counts, inputs);

  rollout::CollectOptions opts;
  opts.strategy = config.strategy;
  opts.gamma = config.gamma;
  opts.greedy = greedy;
  Rng rng(derive_seed(seed, 4));
  EvalResult result;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t episode_seed = rng();
    const auto traj = rollout::collect_episode(*env, checkpoint.policy, opts, episode_seed, rng);
    result.returns.push_back(traj.episode_return);
  }
  double sum = 0.0;
  for (double r : result.returns) sum += r;
  result.mean = sum / episodes;
  double sq = 0.0;
  for (double r : result.returns) sq += (r - result.mean) * (r - result.mean);
  result.std = std::sqrt(sq / episodes);
  return result;
}

}  // namespace asyncopt::train
