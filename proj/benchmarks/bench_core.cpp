#include <benchmark/benchmark.h>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/log.hpp"
#include "asyncopt/net/mlp.hpp"
#include "asyncopt/policy/conditional.hpp"
#include "asyncopt/rollout/collector.hpp"

using namespace asyncopt;

namespace {

net::ParamSet bench_net(int in, int out) {
  Rng rng(0);
  const std::vector<int> widths{in, 64, 64, out};
  return net::make_mlp(widths, net::Activation::Tanh, 1.0, 0.01, rng);
}

void BM_Forward(benchmark::State& state) {
  const auto net = bench_net(38, 75);
  const std::vector<double> x(38, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(net::forward(net, x));
}
BENCHMARK(BM_Forward);

void BM_Backward(benchmark::State& state) {
  const auto net = bench_net(38, 75);
  const std::vector<double> x(38, 0.1);
  const std::vector<double> g(75, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(net::backward(net, x, g));
}
BENCHMARK(BM_Backward);

void BM_EvaluateConditional(benchmark::State& state) {
  const std::vector<int> counts{3, 3, 5};
  Rng rng(1);
  std::normal_distribution<double> g;
  std::vector<double> logits(45);
  for (double& l : logits) l = g(rng);
  policy::ConditionalQuery q;
  q.fixed = {{1, 2}};
  q.targets = {0, 2};
  for (auto _ : state) benchmark::DoNotOptimize(policy::evaluate_conditional(logits, counts, q, 3));
}
BENCHMARK(BM_EvaluateConditional);

void BM_CollectEpisode(benchmark::State& state, const char* env_name,
                       options::ExecutionStrategy strategy) {
  set_log_sink({});
  const auto set = strategy == options::ExecutionStrategy::End2End ? options::OptionSet::Primitive
                                                                   : options::OptionSet::Macro;
  auto env = envs::make_env(env_name, {}, set);
  Rng init(0);
  const auto pol = policy::ActorCritic::create(
      policy::PolicyMode::Centralized, env->option_counts(),
      rollout::head_input_sizes(*env, policy::PolicyMode::Centralized), {}, init);
  rollout::CollectOptions opts;
  opts.strategy = strategy;
  Rng rng(2);
  std::int64_t steps = 0;
  for (auto _ : state) {
    const auto traj = rollout::collect_episode(*env, pol, opts, rng(), rng);
    steps += traj.low_level_steps;
  }
  state.counters["env_steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_CollectEpisode, td_async, "tool_delivery", options::ExecutionStrategy::AsyncContinue);
BENCHMARK_CAPTURE(BM_CollectEpisode, td_end2end, "tool_delivery", options::ExecutionStrategy::End2End);
BENCHMARK_CAPTURE(BM_CollectEpisode, wf_async, "water_filling", options::ExecutionStrategy::AsyncContinue);

}  // namespace

BENCHMARK_MAIN();
