#include "hlrp/optim.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hlrp/error.hpp"

namespace hlrp {
namespace {

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParamStore store;
  store.add("theta", Matrix{{1.0}}).grad = Matrix{{1.0}};
  AdamState state;
  adam_step(store, state);
  EXPECT_NEAR(store.at("theta").value(0, 0), 0.99, 1e-9);
  EXPECT_EQ(state.step_count, 1);
}

TEST(AdamTest, ZeroGradientIsFixedPoint) {
  ParamStore store;
  store.add("W", Matrix{{0.3, -2.0}, {5.0, 0.0}});
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_step(store, state);
  EXPECT_EQ(store.at("W").value, (Matrix{{0.3, -2.0}, {5.0, 0.0}}));
  EXPECT_EQ(state.step_count, 5);
}

TEST(AdamTest, ParametersUpdateIndependently) {
  auto run = [](std::vector<std::string> names) {
    ParamStore store;
    for (const auto& n : names) {
      const double g = n == "a" ? 0.7 : -3.0;
      store.add(n, Matrix{{n == "a" ? 1.0 : -1.0}}).grad = Matrix{{g}};
    }
    AdamState state;
    for (int i = 0; i < 3; ++i) adam_step(store, state);
    return store;
  };
  const ParamStore both = run({"a", "b"});
  EXPECT_EQ(both.at("a").value, run({"a"}).at("a").value);
  EXPECT_EQ(both.at("b").value, run({"b"}).at("b").value);
}

TEST(AdamTest, MissingGradientFails) {
  ParamStore store;
  store.add("W", Matrix{{1.0}}).grad = Matrix();
  AdamState state;
  EXPECT_THROW(adam_step(store, state), Error);
}

TEST(FiniteDifferenceTest, Quadratic) {
  ParamStore store;
  store.add("t", Matrix{{3.0}});
  const auto g = finite_difference_grad(
      [](const ParamStore& p) { return std::pow(p.at("t").value(0, 0), 2); }, store, 1e-5);
  EXPECT_NEAR(g.at("t")(0, 0), 6.0, 1e-6);
  EXPECT_EQ(store.at("t").value(0, 0), 3.0);
}

TEST(FiniteDifferenceTest, ConstantIsZero) {
  ParamStore store;
  store.add("t", Matrix{{1.0, 2.0}});
  const auto g = finite_difference_grad([](const ParamStore&) { return 4.0; }, store);
  EXPECT_EQ(g.at("t"), Matrix(1, 2));
}

TEST(FiniteDifferenceTest, SigmoidSlopeAtZero) {
  ParamStore store;
  store.add("t", Matrix{{0.0}});
  const auto g = finite_difference_grad(
      [](const ParamStore& p) { return sigmoid(p.at("t").value(0, 0)); }, store);
  EXPECT_NEAR(g.at("t")(0, 0), 0.25, 1e-9);
}

TEST(RelativeErrorTest, UsesUnitFloor) {
  EXPECT_DOUBLE_EQ(max_relative_error(Matrix{{0.1}}, Matrix{{0.2}}), 0.1);
  EXPECT_DOUBLE_EQ(max_relative_error(Matrix{{10.0}}, Matrix{{11.0}}), 0.1);
}

TEST(InitTest, DeterministicAndBounded) {
  const Matrix a = init_params(30, 20, 9);
  EXPECT_EQ(a, init_params(30, 20, 9));
  EXPECT_NE(a, init_params(30, 20, 10));
  const double bound = std::sqrt(6.0 / 50.0);
  for (double v : a.data()) EXPECT_LE(std::abs(v), bound);
}

TEST(InitTest, MeanNearZero) {
  const Matrix a = init_params(1000, 1, 4);
  const double bound = std::sqrt(6.0 / 1001.0);
  const double mean = sum(a) / 1000.0;
  const double se = bound / std::sqrt(3.0) / std::sqrt(1000.0);
  EXPECT_LT(std::abs(mean), 3 * se);
}

}  // namespace
}  // namespace hlrp
