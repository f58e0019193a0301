#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "asyncopt/envs/tool_delivery.hpp"
#include "asyncopt/envs/water_fill.hpp"
#include "asyncopt/log.hpp"
#include "asyncopt/options/engine.hpp"
#include "duration_env.hpp"

using namespace asyncopt;
using namespace asyncopt::options;
using envs::Cell;
using envs::WaterFillEnv;

namespace {

struct Quiet : ::testing::Environment {
  void SetUp() override { set_log_sink({}); }
};
const auto* const quiet = ::testing::AddGlobalTestEnvironment(new Quiet);

WaterFillEnv quiet_wf() {
  envs::WaterFillConfig c;
  c.decay_mean_min = c.decay_mean_max = 0.0;
  WaterFillEnv env(c);
  env.reset(0);
  return env;
}

int option_id(const MultiAgentEnv& env, int agent, const std::string& name) {
  for (int o = 0; o < env.num_options(agent); ++o) {
    if (env.option_name(agent, o) == name) return o;
  }
  throw std::runtime_error("no option " + name);
}

}  // namespace

TEST(DecisionSet, AsyncSplitsFinishedFromRunning) {
  const auto d = compute_decision_set(ExecutionStrategy::AsyncContinue, {true, false}, 7);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->deciding, (std::vector<int>{0}));
  EXPECT_EQ(d->continuing, (std::vector<int>{1}));
  EXPECT_EQ(d->step, 7);
}

TEST(DecisionSet, SyncCutEveryoneDecides) {
  const auto d = compute_decision_set(ExecutionStrategy::SyncCut, {false, true, false}, 3);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->deciding, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(d->continuing.empty());
}

TEST(DecisionSet, SyncWaitNeedsEveryone) {
  EXPECT_FALSE(compute_decision_set(ExecutionStrategy::SyncWait, {true, false}, 3));
  const auto d = compute_decision_set(ExecutionStrategy::SyncWait, {true, true}, 3);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->deciding, (std::vector<int>{0, 1}));
}

TEST(DecisionSet, NothingFinishedIsNotADecisionPoint) {
  for (auto s : {ExecutionStrategy::AsyncContinue, ExecutionStrategy::SyncCut,
                 ExecutionStrategy::SyncWait}) {
    EXPECT_FALSE(compute_decision_set(s, {false, false}, 1)) << to_string(s);
  }
}

TEST(DecisionSet, End2EndDecidesEveryStep) {
  const auto d = compute_decision_set(ExecutionStrategy::End2End, {false, false}, 5);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->deciding, (std::vector<int>{0, 1}));
}

TEST(DecisionSet, AlwaysPartitionsTheAgents) {
  for (auto s : {ExecutionStrategy::AsyncContinue, ExecutionStrategy::SyncCut,
                 ExecutionStrategy::SyncWait, ExecutionStrategy::End2End}) {
    for (unsigned mask = 0; mask < 16; ++mask) {
      std::vector<bool> finished;
      for (int i = 0; i < 4; ++i) finished.push_back((mask >> i) & 1u);
      const auto d = compute_decision_set(s, finished, 0);
      if (!d) continue;
      std::vector<int> all = d->deciding;
      all.insert(all.end(), d->continuing.begin(), d->continuing.end());
      std::sort(all.begin(), all.end());
      EXPECT_EQ(all, (std::vector<int>{0, 1, 2, 3})) << to_string(s) << " mask " << mask;
      EXPECT_EQ(std::set<int>(all.begin(), all.end()).size(), 4u);
    }
  }
}

TEST(ParseStrategy, AcceptsNamesAndRejectsOthers) {
  EXPECT_EQ(parse_strategy("async"), ExecutionStrategy::AsyncContinue);
  EXPECT_EQ(parse_strategy("sync_cut"), ExecutionStrategy::SyncCut);
  EXPECT_EQ(parse_strategy("sync_wait"), ExecutionStrategy::SyncWait);
  EXPECT_EQ(parse_strategy("end2end"), ExecutionStrategy::End2End);
  EXPECT_THROW(parse_strategy("sometimes"), ConfigError);
}

TEST(AdvanceLowLevel, DroneNavToMovesFourCellsTowardJar) {
  auto env = quiet_wf();
  env.mutable_state().drone = Cell{10, 10};
  const int nav0 = option_id(env, 0, "NavTo(0)");  // jar 0 at (1, 1)
  std::vector<OngoingOption> ongoing{{nav0, 0, 0}, {0, 0, 0}};
  const auto step = advance_low_level(env, ongoing, {false, true});
  EXPECT_EQ(manhattan(Cell{10, 10}, env.state().drone), 4);
  EXPECT_EQ(manhattan(env.state().drone, Cell{1, 1}), 14);
  EXPECT_FALSE(step.terminated[0]);
  EXPECT_EQ(ongoing[0].elapsed, 1);
}

TEST(AdvanceLowLevel, OneStepMoveTerminatesAfterOneStep) {
  auto env = quiet_wf();
  const int up = option_id(env, 1, "Up");
  std::vector<OngoingOption> ongoing{{0, 0, 0}, {up, 0, 0}};
  const Cell before = env.state().vehicle;
  const auto step = advance_low_level(env, ongoing, {true, false});
  EXPECT_TRUE(step.terminated[1]);
  EXPECT_FALSE(step.forced[1]);
  EXPECT_EQ(env.state().vehicle, (Cell{before.x, before.y - 1}));
}

TEST(AdvanceLowLevel, GoalAlreadyHeldTerminatesWithoutMoving) {
  auto env = quiet_wf();
  env.mutable_state().drone = Cell{1, 1};
  const int nav0 = option_id(env, 0, "NavTo(0)");
  std::vector<OngoingOption> ongoing{{nav0, 0, 0}, {0, 0, 0}};
  const auto step = advance_low_level(env, ongoing, {false, true});
  EXPECT_TRUE(step.terminated[0]);
  EXPECT_EQ(step.actions[0], env.noop_action(0));
  EXPECT_EQ(env.state().drone, (Cell{1, 1}));
}

TEST(AdvanceLowLevel, IdleAgentsEmitNoop) {
  auto env = quiet_wf();
  const int up = option_id(env, 1, "Up");
  std::vector<OngoingOption> ongoing{{up, 0, 0}, {up, 0, 0}};
  const Cell drone = env.state().drone;
  const auto step = advance_low_level(env, ongoing, {true, false});
  EXPECT_EQ(step.actions[0], WaterFillEnv::kNoop);
  EXPECT_EQ(env.state().drone, drone);
  EXPECT_EQ(ongoing[0].elapsed, 0);
}

TEST(CheckTermination, GoalMidPathAndCap) {
  auto env = quiet_wf();
  const int nav0 = option_id(env, 0, "NavTo(0)");
  env.mutable_state().drone = Cell{1, 1};
  EXPECT_TRUE(check_termination(env, 0, {nav0, 0, 3}));
  env.mutable_state().drone = Cell{8, 8};
  EXPECT_FALSE(check_termination(env, 0, {nav0, 0, 3}));
  EXPECT_TRUE(check_termination(env, 0, {nav0, 0, env.max_duration(0, nav0)}));
}

TEST(CheckTermination, CapForcesTerminationAndIsReported) {
  envs::ToolDeliveryEnv td;
  td.reset(0);
  std::vector<OngoingOption> stuck{{2, 0, td.max_duration(0, 2) - 1}, {0, 0, 0}, {0, 0, 0}};
  td.mutable_state().position[0] = 1;  // far from having a tool: GetTool cannot finish
  const auto forced = advance_low_level(td, stuck, {false, true, true});
  EXPECT_TRUE(forced.terminated[0]);
  EXPECT_TRUE(forced.forced[0]);
}

TEST(Scheduler, StartRejectsOptionOutsideInitiationSet) {
  auto env = quiet_wf();
  OptionScheduler sched(ExecutionStrategy::AsyncContinue, 2);
  const int fill0 = option_id(env, 1, "Fill(0)");
  EXPECT_THROW(sched.start(env, 1, fill0, 0), Error);
}

TEST(Scheduler, SyncCutCountsInterruptions) {
  testenv::DurationEnv env({{2}, {5}}, 20);
  env.reset(0);
  OptionScheduler sched(ExecutionStrategy::SyncCut, 2);
  sched.start(env, 0, 0, 0);
  sched.start(env, 1, 0, 0);
  sched.advance(env);
  EXPECT_FALSE(sched.decision_point());
  sched.advance(env);
  const auto d = sched.decision_point();
  ASSERT_TRUE(d);
  EXPECT_EQ(d->deciding, (std::vector<int>{0, 1}));
  sched.start(env, 0, 0, sched.step());
  sched.start(env, 1, 0, sched.step());
  EXPECT_EQ(sched.interruptions(), 1);
}

TEST(Scheduler, AsyncNeverInterrupts) {
  testenv::DurationEnv env({{2}, {3}}, 60);
  env.reset(0);
  OptionScheduler sched(ExecutionStrategy::AsyncContinue, 2);
  for (int k = 0; k < 60; ++k) {
    if (auto d = sched.decision_point()) {
      for (int a : d->deciding) sched.start(env, a, 0, sched.step());
    }
    sched.advance(env);
  }
  EXPECT_EQ(sched.interruptions(), 0);
}

TEST(Scheduler, SyncWaitIdlesFinishedAgents) {
  testenv::DurationEnv env({{1}, {3}}, 20);
  env.reset(0);
  OptionScheduler sched(ExecutionStrategy::SyncWait, 2);
  sched.start(env, 0, 0, 0);
  sched.start(env, 1, 0, 0);
  sched.advance(env);
  EXPECT_TRUE(sched.finished()[0]);
  const auto second = sched.advance(env);
  EXPECT_EQ(sched.ongoing()[0].elapsed, 1);  // idled, not advanced
  EXPECT_EQ(second.actions[0], env.noop_action(0));
  EXPECT_FALSE(sched.decision_point());
  sched.advance(env);
  EXPECT_TRUE(sched.decision_point());
}
