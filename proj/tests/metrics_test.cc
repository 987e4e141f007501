#include "hlrp/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlrp/error.hpp"
#include "support.hpp"

namespace hlrp {
namespace {

std::vector<std::size_t> range(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

TEST(HitsTest, Examples) {
  // truth of 10, 4 of them inside the top 50
  std::vector<std::size_t> rec = range(60);
  std::vector<std::size_t> truth = {1, 2, 3, 4, 55, 56, 57, 58, 59, 100};
  EXPECT_DOUBLE_EQ(*hits_at_k(rec, truth, 50), 0.4);
  EXPECT_DOUBLE_EQ(*hits_at_k(rec, std::vector<std::size_t>{0, 9, 49}, 50), 1.0);

  std::vector<std::size_t> big_truth;
  for (std::size_t i = 0; i < 120; ++i) big_truth.push_back(i);
  for (std::size_t i = 1000; i < 1180; ++i) big_truth.push_back(i);
  EXPECT_DOUBLE_EQ(*hits_at_k(range(200), big_truth, 200), 0.6);
}

TEST(HitsTest, EmptyTruthAndZeroK) {
  EXPECT_FALSE(hits_at_k(range(5), {}, 3).has_value());
  EXPECT_THROW(hits_at_k(range(5), std::vector<std::size_t>{1}, 0), EvalError);
}

TEST(HitsTest, MatchesOracleAndMonotone) {
  Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(80);
    std::vector<std::size_t> ranking = range(n);
    rng.shuffle(ranking);
    ranking.resize(1 + rng.below(n));
    std::set<std::size_t> truth;
    const std::size_t t = 1 + rng.below(n);
    while (truth.size() < t) truth.insert(rng.below(n));
    const std::vector<std::size_t> sorted(truth.begin(), truth.end());
    const std::size_t k = 1 + rng.below(n + 5);
    EXPECT_EQ(*hits_at_k(ranking, sorted, k), testing::brute_force_hits(ranking, truth, k));
    const double now = *hits_at_k(ranking, sorted, k);
    const double next = *hits_at_k(ranking, sorted, k + 1);
    EXPECT_LE(std::lround(now * std::min(k, t)), std::lround(next * std::min(k + 1, t)));
    if (k >= t) EXPECT_LE(now, next);
  }
}

TEST(AucTest, Examples) {
  EXPECT_EQ(auc(std::vector<double>{2, 3}, std::vector<double>{0, 1}), 1.0);
  EXPECT_EQ(auc(std::vector<double>{1, 1}, std::vector<double>{1, 1, 1}), 0.5);
  EXPECT_EQ(auc(std::vector<double>{1, 3}, std::vector<double>{2}), 0.5);
  EXPECT_THROW(auc({}, std::vector<double>{1}), EvalError);
  EXPECT_THROW(auc(std::vector<double>{1}, {}), EvalError);
}

TEST(AucTest, InvariantUnderMonotoneTransform) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pos(1 + rng.below(30)), neg(1 + rng.below(30));
    for (double& x : pos) x = std::round(rng.uniform(-3, 3) * 4) / 4;
    for (double& x : neg) x = std::round(rng.uniform(-3, 3) * 4) / 4;
    auto f = [](double x) { return std::exp(x) + x * x * x; };
    std::vector<double> pos2, neg2;
    for (double x : pos) pos2.push_back(f(x));
    for (double x : neg) neg2.push_back(f(x));
    EXPECT_EQ(auc(pos, neg), auc(pos2, neg2));
  }
}

}  // namespace
}  // namespace hlrp
