#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "asyncopt/envs/registry.hpp"
#include "asyncopt/log.hpp"
#include "asyncopt/rollout/collector.hpp"
#include "asyncopt/rollout/gae.hpp"
#include "asyncopt/rollout/trajectory_dump.hpp"
#include "duration_env.hpp"
#include "oracles.hpp"

using namespace asyncopt;
using namespace asyncopt::rollout;
using options::ExecutionStrategy;
using policy::PolicyMode;

namespace {

struct Quiet : ::testing::Environment {
  void SetUp() override { set_log_sink({}); }
};
const auto* const quiet = ::testing::AddGlobalTestEnvironment(new Quiet);

policy::ActorCritic make_policy(const options::MultiAgentEnv& env, PolicyMode mode,
                                std::uint64_t seed = 0) {
  Rng rng(seed);
  policy::NetworkConfig net;
  net.hidden = {16};
  return policy::ActorCritic::create(mode, env.option_counts(), head_input_sizes(env, mode), net,
                                     rng);
}

OptionTrajectory run(options::MultiAgentEnv& env, ExecutionStrategy s,
                     PolicyMode mode = PolicyMode::Centralized, double gamma = 0.9,
                     std::uint64_t seed = 1) {
  const auto policy = make_policy(env, mode);
  CollectOptions opts;
  opts.strategy = s;
  opts.gamma = gamma;
  Rng rng(seed);
  return collect_episode(env, policy, opts, seed, rng);
}

std::vector<std::int64_t> ks(const OptionTrajectory& t) {
  std::vector<std::int64_t> out;
  for (const auto& r : t.records) out.push_back(r.k);
  return out;
}

}  // namespace

TEST(AggregateSegmentReward, DiscountsWithinSegment) {
  EXPECT_DOUBLE_EQ(aggregate_segment_reward(std::vector<double>{1, 1, 1}, 0.5), 1.75);
  EXPECT_DOUBLE_EQ(aggregate_segment_reward(std::vector<double>{2}, 0.9), 2.0);
  EXPECT_DOUBLE_EQ(aggregate_segment_reward(std::vector<double>{}, 0.9), 0.0);
  EXPECT_DOUBLE_EQ(aggregate_segment_reward(std::vector<double>{1, -2, 4}, 0.5), 1.0 - 1.0 + 1.0);
}

TEST(Gae, LambdaZeroIsOneStepTdError) {
  const std::vector<double> r{1.0, 2.0}, v{0.5, 0.25};
  const std::vector<int> gaps{2, 3};
  const auto out = compute_gae(r, gaps, v, 1.0, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(out.advantages[0], 1.0 + 0.25 * 0.25 - 0.5);
  EXPECT_DOUBLE_EQ(out.advantages[1], 2.0 + 0.125 * 1.0 - 0.25);
}

TEST(Gae, SingleRecord) {
  const auto out = compute_gae(std::vector<double>{3.0}, std::vector<int>{4},
                               std::vector<double>{1.0}, 2.0, 0.5, 0.7);
  EXPECT_DOUBLE_EQ(out.advantages[0], 3.0 + 0.0625 * 2.0 - 1.0);
  EXPECT_DOUBLE_EQ(out.returns[0], out.advantages[0] + 1.0);
}

TEST(Gae, VariableGapsMatchExplicitSumExactly) {
  // Dyadic inputs keep every operation exact.
  const std::vector<double> r{1.0, -0.5, 2.0}, v{0.25, 0.75, -1.0};
  const std::vector<int> gaps{1, 3, 2};
  const double gamma = 0.5, lambda = 0.5;
  for (double bootstrap : {0.0, 1.5}) {
    const auto out = compute_gae(r, gaps, v, bootstrap, gamma, lambda);
    const auto expected = oracle::explicit_gap_gae(r, gaps, v, bootstrap, gamma, lambda);
    for (std::size_t t = 0; t < r.size(); ++t) {
      EXPECT_EQ(out.advantages[t], expected[t]) << "t=" << t;
      EXPECT_EQ(out.returns[t], expected[t] + v[t]);
    }
  }
}

TEST(Gae, UnitGapsReduceToStandardGae) {
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial;
    std::vector<double> r(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(n));
    for (auto& x : r) x = g(rng);
    for (auto& x : v) x = g(rng);
    const double boot = g(rng);
    const std::vector<int> gaps(static_cast<std::size_t>(n), 1);
    const auto out = compute_gae(r, gaps, v, boot, 0.99, 0.95);
    const auto expected = oracle::standard_gae(r, v, boot, 0.99, 0.95);
    for (int t = 0; t < n; ++t) {
      EXPECT_NEAR(out.advantages[static_cast<std::size_t>(t)], expected[static_cast<std::size_t>(t)], 1e-12);
    }
  }
}

TEST(Gae, RejectsMismatchedLengths) {
  EXPECT_THROW(compute_gae(std::vector<double>{1.0, 2.0}, std::vector<int>{1},
                           std::vector<double>{0.0, 0.0}, 0.0, 0.9, 0.9),
               DimensionError);
}

TEST(Normalize, ZeroMeanUnitStd) {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto n = normalize(x);
  double mean = 0.0, var = 0.0;
  for (double v : n) mean += v;
  mean /= 4.0;
  for (double v : n) var += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(var / 4.0), 1.0, 1e-6);
  EXPECT_EQ(normalize(std::vector<double>{5.0}), (std::vector<double>{0.0}));
}

TEST(Collect, AsyncToyScheduleHasSevenRecords) {
  // Agent 0's option lasts 2 steps, agent 1's 3 steps, 10-step episode.
  testenv::DurationEnv env({{2}, {3}}, 10);
  const auto traj = run(env, ExecutionStrategy::AsyncContinue);
  ASSERT_EQ(traj.records.size(), 7u);
  EXPECT_EQ(ks(traj), (std::vector<std::int64_t>{0, 2, 3, 4, 6, 8, 9}));
  const std::vector<std::vector<int>> deciding{{0, 1}, {0}, {1}, {0}, {0, 1}, {0}, {1}};
  const std::vector<int> gaps{2, 1, 1, 2, 2, 1, 1};
  for (std::size_t t = 0; t < 7; ++t) {
    EXPECT_EQ(traj.records[t].decision.deciding, deciding[t]) << "record " << t;
    EXPECT_EQ(traj.records[t].gap, gaps[t]);
  }
  EXPECT_EQ(traj.records[1].fixed(), (policy::ConditionAssignment{{1, 0}}));
  EXPECT_FALSE(traj.terminal);
}

TEST(Collect, SyncCutAndSyncWaitToySchedules) {
  testenv::DurationEnv env({{2}, {3}}, 10);
  EXPECT_EQ(ks(run(env, ExecutionStrategy::SyncCut)), (std::vector<std::int64_t>{0, 2, 4, 6, 8}));
  EXPECT_EQ(ks(run(env, ExecutionStrategy::SyncWait)), (std::vector<std::int64_t>{0, 3, 6, 9}));
}

TEST(Collect, SegmentRewardsAreDiscountedSums) {
  std::vector<double> rewards;
  for (int k = 0; k < 10; ++k) rewards.push_back(k + 1.0);
  testenv::DurationEnv env({{2}, {3}}, 10, rewards);
  const auto traj = run(env, ExecutionStrategy::AsyncContinue, PolicyMode::Centralized, 0.5);
  EXPECT_DOUBLE_EQ(traj.records[0].segment_reward, 1.0 + 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(traj.records[1].segment_reward, 3.0);
  EXPECT_DOUBLE_EQ(traj.records[3].segment_reward, 5.0 + 0.5 * 6.0);
  EXPECT_DOUBLE_EQ(traj.episode_return, 55.0);
}

TEST(Collect, RewardMassIsConservedOnRealEnvs) {
  for (const std::string name : {"water_filling", "tool_delivery"}) {
    for (auto s : {ExecutionStrategy::AsyncContinue, ExecutionStrategy::SyncCut,
                   ExecutionStrategy::SyncWait, ExecutionStrategy::End2End}) {
      const auto set = s == ExecutionStrategy::End2End ? options::OptionSet::Primitive
                                                       : options::OptionSet::Macro;
      auto env = envs::make_env(name, {}, set);
      const double gamma = 0.97;
      const auto traj = run(*env, s, PolicyMode::Centralized, gamma, 3);
      double lhs = 0.0, rhs = 0.0;
      for (const auto& r : traj.records) lhs += std::pow(gamma, static_cast<double>(r.k)) * r.segment_reward;
      for (std::size_t k = 0; k < traj.low_level_rewards.size(); ++k) {
        rhs += std::pow(gamma, static_cast<double>(k)) * traj.low_level_rewards[k];
      }
      EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs))) << name << " " << to_string(s);
      std::int64_t total_gap = 0;
      for (std::size_t t = 0; t < traj.records.size(); ++t) {
        const auto& r = traj.records[t];
        EXPECT_FALSE(r.decision.deciding.empty());
        EXPECT_GE(r.gap, 1);
        if (t > 0) EXPECT_GT(r.k, traj.records[t - 1].k);
        total_gap += r.gap;
      }
      EXPECT_EQ(total_gap, traj.low_level_steps);
    }
  }
}

TEST(Collect, End2EndRecordsEveryStepWithNothingFixed) {
  auto env = envs::make_env("water_filling", {}, options::OptionSet::Primitive);
  const auto traj = run(*env, ExecutionStrategy::End2End);
  EXPECT_EQ(static_cast<std::int64_t>(traj.records.size()), traj.low_level_steps);
  for (const auto& r : traj.records) {
    EXPECT_EQ(r.gap, 1);
    EXPECT_TRUE(r.fixed().empty());
  }
}

TEST(Collect, ChosenOptionsRespectInitiationMasks) {
  auto env = envs::make_env("tool_delivery");
  const auto traj = run(*env, ExecutionStrategy::AsyncContinue, PolicyMode::PartiallyCentralized);
  for (const auto& r : traj.records) {
    for (int a : r.decision.deciding) {
      const auto ua = static_cast<std::size_t>(a);
      EXPECT_TRUE(r.available[ua][static_cast<std::size_t>(r.options[ua])]);
    }
    for (int a : r.decision.continuing) EXPECT_EQ(r.log_probs[static_cast<std::size_t>(a)], 0.0);
  }
}

TEST(Collect, StoredLogProbMatchesRecomputation) {
  auto env = envs::make_env("water_filling");
  for (auto mode : {PolicyMode::Centralized, PolicyMode::PartiallyCentralized}) {
    const auto policy = make_policy(*env, mode, 5);
    CollectOptions opts;
    Rng rng(2);
    const auto traj = collect_episode(*env, policy, opts, 2, rng);
    for (const auto& r : traj.records) {
      for (int h = 0; h < policy.num_heads(); ++h) {
        if (!r.head_active(h, mode)) continue;
        const auto uh = static_cast<std::size_t>(h);
        const auto ev = policy::evaluate_conditional(policy.logits(h, r.inputs[uh]),
                                                     policy.option_counts, r.query(h, mode),
                                                     r.choice(h, mode));
        EXPECT_EQ(ev.log_prob, r.log_probs[uh]);
      }
    }
  }
}

TEST(Collect, SameSeedSameTrajectory) {
  auto env = envs::make_env("water_filling");
  const auto a = run(*env, ExecutionStrategy::AsyncContinue, PolicyMode::Centralized, 0.99, 8);
  const auto b = run(*env, ExecutionStrategy::AsyncContinue, PolicyMode::Centralized, 0.99, 8);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t t = 0; t < a.records.size(); ++t) {
    EXPECT_EQ(a.records[t].options, b.records[t].options);
    EXPECT_EQ(a.records[t].segment_reward, b.records[t].segment_reward);
  }
}

TEST(Collect, EnvironmentFaultTruncatesToLastCompleteRecord) {
  testenv::DurationEnv env({{2}, {3}}, 10, {}, 5);
  const auto traj = run(env, ExecutionStrategy::AsyncContinue);
  EXPECT_TRUE(traj.faulted);
  EXPECT_EQ(ks(traj), (std::vector<std::int64_t>{0, 2, 3}));
  EXPECT_EQ(traj.records.back().gap, 1);
  EXPECT_EQ(traj.bootstrap_values.size(), 1u);
}

TEST(Collect, MinStepsCollectsWholeEpisodes) {
  testenv::DurationEnv env({{2}, {3}}, 10);
  const auto policy = make_policy(env, PolicyMode::Centralized);
  CollectOptions opts;
  opts.min_steps = 25;
  Rng rng(0);
  const auto res = collect(env, policy, opts, rng);
  EXPECT_EQ(res.trajectories.size(), 3u);
  EXPECT_EQ(res.low_level_steps, 30);
  EXPECT_EQ(res.decision_points, 21);
  EXPECT_EQ(res.interruptions, 0);
}

TEST(TrajectoryDump, OneJsonObjectPerRecord) {
  testenv::DurationEnv env({{2}, {3}}, 10);
  const auto traj = run(env, ExecutionStrategy::AsyncContinue);
  std::ostringstream out;
  dump_trajectory(out, traj, 3);
  std::istringstream in(out.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["episode"], 3);
    EXPECT_EQ(j["k"], traj.records[n].k);
    EXPECT_EQ(j["gap"], traj.records[n].gap);
    ++n;
  }
  EXPECT_EQ(n, traj.records.size());
}
