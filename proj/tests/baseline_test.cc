#include "hlrp/baseline.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hlrp/error.hpp"
#include "hlrp/random.hpp"

namespace hlrp {
namespace {

using Vec = std::vector<double>;

TEST(CosineTest, Examples) {
  EXPECT_DOUBLE_EQ(cosine_similarity(Vec{2, 3}, Vec{2, 3}), 1.0);
  EXPECT_EQ(cosine_similarity(Vec{1, 0}, Vec{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(Vec{1, 1}, Vec{1, 0}), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(cosine_similarity(Vec{0, 0}, Vec{1, 0}), 0.0);
  EXPECT_THROW(cosine_similarity(Vec{1}, Vec{1, 0}), ShapeError);
}

TEST(CosineTest, SymmetricAndScaleInvariant) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    Vec u(5), v(5);
    for (double& x : u) x = rng.uniform(-1, 1);
    for (double& x : v) x = rng.uniform(-1, 1);
    EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
    EXPECT_EQ(cosine_similarity(u, v), cosine_similarity(v, u));
    Vec w = v;
    const double s = rng.uniform(0.1, 100);
    for (double& x : w) x *= s;
    EXPECT_NEAR(cosine_similarity(u, w), cosine_similarity(u, v), 1e-14);
  }
}

TEST(BaselineTest, IdenticalRowFirst) {
  const Matrix holders{{0, 1, 0}, {1, 2, 3}, {3, 0, 1}};
  const auto r = baseline_recommend(Vec{1, 2, 3}, holders, 3);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].holder, 1u);
  EXPECT_NEAR(r[0].similarity, 1.0, 1e-15);
}

TEST(BaselineTest, ZeroRowsByIndex) {
  const auto r = baseline_recommend(Vec{1, 2}, Matrix(4, 2), 3);
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r[i].holder, i);
    EXPECT_EQ(r[i].similarity, 0.0);
  }
}

TEST(BaselineTest, HandCosineOrder) {
  // fund (1, 0); holders (1, 1) -> 0.707, (0, 1) -> 0, (2, 1) -> 0.894
  const Matrix holders{{1, 1}, {0, 1}, {2, 1}};
  const auto r = baseline_recommend(Vec{1, 0}, holders, 3);
  EXPECT_EQ(r[0].holder, 2u);
  EXPECT_EQ(r[1].holder, 0u);
  EXPECT_EQ(r[2].holder, 1u);
}

TEST(BaselineTest, ExcludeAndSingleton) {
  const Matrix holders{{1, 1}, {0, 1}, {2, 1}};
  const std::size_t skip[] = {2};
  const auto r = baseline_recommend(Vec{1, 0}, holders, 3, skip);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].holder, 0u);
  for (std::size_t k : {1, 5})
    EXPECT_EQ(baseline_recommend(Vec{1, 0}, Matrix{{0, 3}}, k).size(), 1u);
  EXPECT_THROW(baseline_recommend(Vec{1}, holders, 2), ShapeError);
}

TEST(QuotaTest, LargestRemainder) {
  const double p[] = {0.5, 0.3, 0.2};
  EXPECT_EQ(segment_quota(p, 10).counts, (std::vector<std::size_t>{5, 3, 2}));
  const double q[] = {0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(segment_quota(q, 6).counts, (std::vector<std::size_t>{2, 2, 1, 1}));
}

AumSegmentation two_segments(std::size_t n) {
  AumSegmentation s;
  s.num_segments = 2;
  for (std::size_t i = 0; i < n; ++i) s.assignment.push_back(i % 2);
  return s;
}

std::vector<SimilarHolder> ranking(const std::vector<std::size_t>& holders) {
  std::vector<SimilarHolder> r;
  for (std::size_t i = 0; i < holders.size(); ++i)
    r.push_back({holders[i], 1.0 - 0.01 * static_cast<double>(i)});
  return r;
}

TEST(DiversityTest, EvenSplit) {
  const auto out = diversity_constrain(ranking({0, 2, 4, 6, 1, 3, 5, 7}), two_segments(8), 4);
  ASSERT_EQ(out.size(), 4u);
  std::size_t even = 0;
  for (const auto& h : out) even += h.holder % 2 == 0;
  EXPECT_EQ(even, 2u);
  EXPECT_EQ(out[0].holder, 0u);
  EXPECT_EQ(out[2].holder, 1u);
}

TEST(DiversityTest, Backfill) {
  const auto out = diversity_constrain(ranking({0, 2, 4, 6}), two_segments(8), 4);
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out[i].holder, 2 * i);
}

TEST(DiversityTest, Errors) {
  EXPECT_THROW(diversity_constrain(ranking({0}), two_segments(2), 0), ConfigError);
  EXPECT_THROW(diversity_constrain(ranking({5}), two_segments(2), 1), FeatureError);
}

TEST(DiversityTest, QuotaDeviationAtMostOne) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 40 + rng.below(100);
    AumSegmentation seg;
    seg.num_segments = 4;
    for (std::size_t i = 0; i < n; ++i) seg.assignment.push_back(rng.below(4));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t k = 1 + rng.below(20);
    const auto props = seg.proportions();
    bool enough = true;
    for (std::size_t s = 0; s < 4; ++s)
      enough = enough && seg.sizes()[s] >= static_cast<std::size_t>(std::ceil(props[s] * k)) + 1;
    if (!enough) continue;
    const auto out = diversity_constrain(ranking(order), seg, k);
    ASSERT_EQ(out.size(), k);
    std::vector<long> counts(4);
    for (const auto& h : out) ++counts[seg.assignment[h.holder]];
    for (std::size_t s = 0; s < 4; ++s)
      EXPECT_LE(std::abs(counts[s] - std::lround(props[s] * static_cast<double>(k))), 1);
  }
}

}  // namespace
}  // namespace hlrp
