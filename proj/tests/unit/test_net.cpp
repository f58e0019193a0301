#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "asyncopt/error.hpp"
#include "asyncopt/net/adam.hpp"
#include "asyncopt/net/mlp.hpp"
#include "asyncopt/net/serialize.hpp"
#include "oracles.hpp"

using namespace asyncopt;
using namespace asyncopt::net;

namespace {

ParamSet dense(int rows, int cols, std::vector<double> values, Activation act = Activation::Tanh) {
  ParamSet p;
  p.shapes = {LayerShape{rows, cols, true}};
  p.values = std::move(values);
  p.activation = act;
  return p;
}

ParamSet random_net(std::vector<int> widths, Activation act, std::uint64_t seed) {
  Rng rng(seed);
  auto p = make_mlp(widths, act, 1.0, 1.0, rng);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& v : p.values) v += u(rng);  // non-zero biases too
  return p;
}

}  // namespace

TEST(Forward, IdentityLayerReturnsInput) {
  const auto p = dense(2, 2, {1, 0, 0, 1, 0, 0});
  const std::vector<double> x{1.0, 2.0};
  EXPECT_EQ(forward(p, x), (std::vector<double>{1.0, 2.0}));
}

TEST(Forward, ZeroWeightsGiveZeros) {
  const auto p = dense(2, 2, std::vector<double>(6, 0.0));
  const std::vector<double> x{3.0, -7.0};
  EXPECT_EQ(forward(p, x), (std::vector<double>{0.0, 0.0}));
}

TEST(Forward, SmallTanhNetMatchesHandComputation) {
  ParamSet p;
  p.shapes = {LayerShape{2, 2, true}, LayerShape{1, 2, true}};
  p.values = {0.5, -0.25, 1.0, 2.0, 0.1, -0.2,  // layer 1: W (2x2), b
              1.5, -0.5, 0.3};                  // layer 2: W (1x2), b
  const std::vector<double> x{0.4, -0.6};
  const double h0 = std::tanh(0.5 * 0.4 - 0.25 * -0.6 + 0.1);
  const double h1 = std::tanh(1.0 * 0.4 + 2.0 * -0.6 - 0.2);
  const double expected = 1.5 * h0 - 0.5 * h1 + 0.3;
  const auto y = forward(p, x);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_DOUBLE_EQ(y[0], expected);
}

TEST(Forward, IsPure) {
  const auto p = random_net({3, 5, 2}, Activation::Tanh, 1);
  const std::vector<double> x{0.1, 0.2, 0.3};
  const auto a = forward(p, x);
  const auto b = forward(p, x);
  EXPECT_EQ(a, b);
}

TEST(Forward, WrongInputWidthNamesBothSizes) {
  const auto p = random_net({3, 4, 2}, Activation::Tanh, 2);
  const std::vector<double> x{1.0, 2.0};
  try {
    forward(p, x);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('3'), std::string::npos) << msg;
    EXPECT_NE(msg.find('2'), std::string::npos) << msg;
  }
}

TEST(ParamSetValidate, RejectsLengthMismatch) {
  auto p = dense(2, 2, {1, 2, 3});
  EXPECT_THROW(p.validate(), DimensionError);
}

TEST(Backward, ZeroOutputGradGivesZeroGradient) {
  const auto p = random_net({3, 4, 2}, Activation::Tanh, 3);
  const std::vector<double> x{0.5, -1.0, 2.0};
  const std::vector<double> g{0.0, 0.0};
  const auto grad = backward(p, x, g);
  for (double v : grad.values) EXPECT_EQ(v, 0.0);
}

TEST(Backward, LinearLayerRowGradientIsInput) {
  const auto p = dense(2, 3, {1, 2, 3, 4, 5, 6, 7, 8}, Activation::Identity);
  const std::vector<double> x{0.5, -1.5, 2.0};
  const std::vector<double> g{0.0, 1.0};  // d/dW of output 1
  const auto grad = backward(p, x, g);
  const std::vector<double> expected{0, 0, 0, 0.5, -1.5, 2.0, 0, 1};
  EXPECT_EQ(grad.values, expected);
}

class BackwardFiniteDifference : public ::testing::TestWithParam<Activation> {};

TEST_P(BackwardFiniteDifference, MatchesCentralDifferences) {
  for (std::uint64_t probe = 0; probe < 5; ++probe) {
    const auto p = random_net({3, 4, 3, 2}, GetParam(), 100 + probe);
    Rng rng(probe);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::vector<double> x{u(rng), u(rng), u(rng)};
    const std::vector<double> g{u(rng), u(rng)};
    const auto analytic = backward(p, x, g);
    const auto numeric = oracle::finite_difference(
        [&](const std::vector<double>& v) {
          auto q = p;
          q.values = v;
          const auto y = forward(q, x);
          return y[0] * g[0] + y[1] * g[1];
        },
        p.values);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      EXPECT_LT(oracle::relative_error(analytic.values[i], numeric[i]), 1e-4)
          << "param " << i << " analytic " << analytic.values[i] << " numeric " << numeric[i];
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Activations, BackwardFiniteDifference,
                         ::testing::Values(Activation::Tanh, Activation::Identity));

TEST(Backward, ReluMatchesFiniteDifferencesAwayFromKinks) {
  const auto p = random_net({2, 6, 1}, Activation::Relu, 7);
  const std::vector<double> x{0.3, -0.8};
  const auto trace = forward_trace(p, x);
  for (std::size_t j = 0; j < trace.layers[1].size(); ++j) {
    // pre-activation magnitude check: post-activation either 0 or > 1e-3
    ASSERT_TRUE(trace.layers[1][j] == 0.0 || trace.layers[1][j] > 1e-3);
  }
  const std::vector<double> g{1.0};
  const auto analytic = backward(p, x, g);
  const auto numeric = oracle::finite_difference(
      [&](const std::vector<double>& v) {
        auto q = p;
        q.values = v;
        return forward(q, x)[0];
      },
      p.values, 1e-7);
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    EXPECT_NEAR(analytic.values[i], numeric[i], 1e-6) << "param " << i;
  }
}

TEST(MakeMlp, ShapesChainAndBiasesStartAtZero) {
  Rng rng(0);
  const std::vector<int> widths{5, 8, 3};
  const auto p = make_mlp(widths, Activation::Tanh, 1.0, 0.01, rng);
  EXPECT_EQ(p.input_size(), 5);
  EXPECT_EQ(p.output_size(), 3);
  EXPECT_EQ(p.size(), 5u * 8 + 8 + 8 * 3 + 3);
  for (std::size_t i = 40; i < 48; ++i) EXPECT_EQ(p.values[i], 0.0);
}

TEST(Optimizer, ZeroGradientLeavesParamsAndCountsStep) {
  const auto p = dense(1, 1, {0.25, -0.5});
  const auto state = OptimizerState::fresh(p.size(), 0.1);
  const auto [q, s] = optimizer_step(p, Gradient{{0.0, 0.0}}, state);
  EXPECT_EQ(q.values, p.values);
  EXPECT_EQ(s.step, 1);
}

TEST(Optimizer, FirstStepMovesByStepSizeAgainstGradient) {
  ParamSet p;
  p.shapes = {LayerShape{1, 1, false}};
  p.values = {0.0};
  const auto state = OptimizerState::fresh(1, 0.1);
  const auto [q, s] = optimizer_step(p, Gradient{{1.0}}, state);
  // m_hat = 1, v_hat = 1: step = -0.1 * 1 / (1 + 1e-8)
  EXPECT_NEAR(q.values[0], -0.1, 1e-8);
}

TEST(Optimizer, TwoStepsMatchClosedFormMoments) {
  ParamSet p;
  p.shapes = {LayerShape{1, 1, false}};
  p.values = {1.0};
  auto state = OptimizerState::fresh(1, 0.01);
  auto [q1, s1] = optimizer_step(p, Gradient{{2.0}}, state);
  auto [q2, s2] = optimizer_step(q1, Gradient{{-1.0}}, s1);
  const double m1 = 0.1 * 2.0, v1 = 0.001 * 4.0;
  const double m2 = 0.9 * m1 + 0.1 * -1.0, v2 = 0.999 * v1 + 0.001 * 1.0;
  EXPECT_NEAR(s2.first_moment[0], m2, 1e-15);
  EXPECT_NEAR(s2.second_moment[0], v2, 1e-15);
  const double mh1 = m1 / (1 - 0.9), vh1 = v1 / (1 - 0.999);
  const double mh2 = m2 / (1 - 0.81), vh2 = v2 / (1 - 0.999 * 0.999);
  const double expected = 1.0 - 0.01 * mh1 / (std::sqrt(vh1) + 1e-8) -
                          0.01 * mh2 / (std::sqrt(vh2) + 1e-8);
  EXPECT_NEAR(q2.values[0], expected, 1e-12);
  EXPECT_EQ(s2.step, 2);
}

TEST(Optimizer, NonFiniteGradientThrowsAndChangesNothing) {
  auto p = dense(1, 1, {0.25, -0.5});
  auto state = OptimizerState::fresh(p.size(), 0.1);
  const auto p0 = p;
  const auto s0 = state;
  Gradient g{{std::numeric_limits<double>::quiet_NaN(), 1.0}};
  EXPECT_THROW(apply_optimizer_step(p, g, state), NumericError);
  EXPECT_EQ(p.values, p0.values);
  EXPECT_EQ(state.step, s0.step);
  EXPECT_EQ(state.first_moment, s0.first_moment);
  g.values[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(optimizer_step(p, g, state), NumericError);
}

TEST(ClipGradNorm, ScalesDownOnlyAboveThreshold) {
  Gradient g{{3.0, 4.0}};
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g.values[0], 0.6, 1e-15);
  EXPECT_NEAR(g.values[1], 0.8, 1e-15);
  Gradient small{{0.3, 0.4}};
  clip_grad_norm(small, 1.0);
  EXPECT_EQ(small.values, (std::vector<double>{0.3, 0.4}));
}

TEST(Serialize, ParamsAndOptimizerRoundTripBitExact) {
  const auto p = random_net({4, 7, 3}, Activation::Relu, 11);
  nlohmann::json j = p;
  const auto back = nlohmann::json::parse(j.dump()).get<ParamSet>();
  EXPECT_EQ(back.values, p.values);
  EXPECT_EQ(back.shapes, p.shapes);
  EXPECT_EQ(back.activation, p.activation);

  auto state = OptimizerState::fresh(p.size(), 1e-3);
  auto stepped = back;
  apply_optimizer_step(stepped, Gradient{std::vector<double>(p.size(), 0.1)}, state);
  nlohmann::json js = state;
  const auto sback = nlohmann::json::parse(js.dump()).get<OptimizerState>();
  EXPECT_EQ(sback.first_moment, state.first_moment);
  EXPECT_EQ(sback.second_moment, state.second_moment);
  EXPECT_EQ(sback.step, state.step);
}
