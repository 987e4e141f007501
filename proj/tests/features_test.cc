#include "hlrp/features.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "hlrp/error.hpp"
#include "support.hpp"

namespace hlrp {
namespace {

HoldingsData parse(const std::string& rows) {
  std::istringstream in(std::string(kHoldingsHeader) + "\n" + rows);
  return parse_holdings(in);
}

std::vector<double> column(const Matrix& m, std::size_t j) {
  std::vector<double> out;
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(m(i, j));
  return out;
}

TEST(SchemaTest, DistinctColumnsSorted) {
  const auto d = parse(
      "2021Q1,H1,F1,1,Equity,passive,X\n"
      "2021Q1,H1,F2,1,Bond,passive,X\n");
  const FeatureSchema s = build_schema(d.quarters);
  ASSERT_EQ(s.width(), 4u);
  EXPECT_TRUE(std::is_sorted(s.columns.begin(), s.columns.end()));
  EXPECT_EQ(s.columns[0], (FeatureColumn{"category", "Bond"}));
  EXPECT_EQ(build_schema(d.quarters), s);
}

TEST(SchemaTest, SinglePosition) {
  const auto d = parse("2021Q1,H1,F1,1,Equity,passive,X\n");
  EXPECT_EQ(build_schema(d.quarters).width(), 3u);
}

TEST(SchemaTest, EmptyInputFails) {
  EXPECT_THROW(build_schema({}), FeatureError);
}

TEST(FeaturizeTest, SinglePosition) {
  const auto d = parse(
      "2021Q1,H1,F1,100,Equity,passive,X\n"
      "2021Q1,H2,F2,1,Bond,active,Y\n");
  const FeatureSchema s = build_schema(d.quarters);
  const auto f = featurize(d.quarters[0], s);
  for (std::size_t j = 0; j < s.width(); ++j) {
    const auto& c = s.columns[j];
    const bool own = c.value == "Equity" || c.value == "passive" || c.value == "X";
    EXPECT_EQ(f.holders.values(0, j), own ? 100.0 : 0.0) << c.value;
  }
}

TEST(FeaturizeTest, HolderWithoutPositionsIsZero) {
  const auto d = parse(
      "2021Q1,H1,F1,100,Equity,passive,X\n"
      "2021Q2,H2,F1,100,Equity,passive,X\n");
  const FeatureSchema s = build_schema(d.quarters);
  const auto f = featurize(d.quarter("2021Q1"), s);
  EXPECT_EQ(f.holders.values.rows(), 2u);
  for (std::size_t j = 0; j < s.width(); ++j) EXPECT_EQ(f.holders.values(1, j), 0.0);
}

TEST(FeaturizeTest, FundSumsHolders) {
  const auto d = parse(
      "2021Q1,H1,F1,10,Equity,passive,X\n"
      "2021Q1,H2,F1,30,Equity,passive,X\n");
  const FeatureSchema s = build_schema(d.quarters);
  const auto f = featurize(d.quarters[0], s);
  EXPECT_EQ(f.funds.values(0, s.index_of("category", "Equity")), 40.0);
  EXPECT_EQ(f.funds.values(0, s.index_of("issuer", "X")), 40.0);
}

TEST(FeaturizeTest, UnknownValueNamed) {
  const auto d = parse("2021Q1,H1,F1,10,Equity,passive,X\n");
  const auto other = parse("2021Q1,H1,F1,10,Crypto,passive,X\n");
  try {
    featurize(other.quarters[0], build_schema(d.quarters));
    FAIL();
  } catch (const FeatureError& e) {
    EXPECT_NE(std::string(e.what()).find("Crypto"), std::string::npos);
  }
}

TEST(FeaturizeTest, MatchesBruteForceOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::istringstream in(testing::random_holdings_csv(rng, 20));
    const HoldingsData d = parse_holdings(in);
    const FeatureSchema s = build_schema(d.quarters);
    const auto got = featurize(d.quarters[0], s);
    const auto want = testing::brute_force_featurize(d.quarters[0], s);
    EXPECT_EQ(got.holders.values, want.holders.values);
    EXPECT_EQ(got.funds.values, want.funds.values);
  }
}

TEST(FeaturizeTest, Linearity) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    std::istringstream in(testing::random_holdings_csv(rng, 20));
    const HoldingsData d = parse_holdings(in);
    QuarterSnapshot doubled = d.quarters[0];
    for (Position& p : doubled.positions) p.market_value *= 2;
    const FeatureSchema s = build_schema(d.quarters);
    EXPECT_EQ(featurize(doubled, s).holders.values,
              affine(featurize(d.quarters[0], s).holders.values, 2.0, 0.0));
  }
}

TEST(FeaturizeTest, RowOrderDoesNotMatter) {
  const std::string a = "2021Q1,H1,F1,10,Equity,passive,X\n";
  const std::string b = "2021Q1,H2,F2,7,Bond,active,Y\n";
  const std::string c = "2021Q1,H1,F2,3,Bond,active,Y\n";
  const auto d1 = parse(a + b + c);
  const auto d2 = parse(a + c + b);
  const FeatureSchema s1 = build_schema(d1.quarters);
  EXPECT_EQ(s1, build_schema(d2.quarters));
  EXPECT_EQ(featurize(d1.quarters[0], s1).holders.values,
            featurize(d2.quarters[0], s1).holders.values);
}

TEST(ScaleTest, Examples) {
  const auto a = min_max_scale({NodeKind::Holder, Matrix{{0, 7, 2}, {5, 7, 4}, {10, 7, 8}}});
  EXPECT_EQ(column(a.matrix.values, 0), (std::vector<double>{0, 0.5, 1}));
  EXPECT_EQ(column(a.matrix.values, 1), (std::vector<double>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(a.matrix.values(1, 2), 1.0 / 3.0);
  EXPECT_EQ(a.matrix.values(0, 2), 0.0);
  EXPECT_EQ(a.matrix.values(2, 2), 1.0);
}

TEST(ScaleTest, FrozenScalerClamps) {
  const MinMaxScaler s = MinMaxScaler::fit(Matrix{{0}, {10}});
  EXPECT_EQ(s.transform(Matrix{{-5}, {5}, {20}}), (Matrix{{0}, {0.5}, {1}}));
}

TEST(ScaleTest, RangeProperty) {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m(1 + rng.below(10), 1 + rng.below(6));
    for (double& v : m.data()) v = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0, 1e9);
    const Matrix scaled = min_max_scale({NodeKind::Fund, m}).matrix.values;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto src = column(m, j), col = column(scaled, j);
      const bool constant = *std::min_element(src.begin(), src.end()) ==
                            *std::max_element(src.begin(), src.end());
      if (constant) {
        for (double v : col) EXPECT_EQ(v, 0.0);
      } else {
        EXPECT_EQ(*std::min_element(col.begin(), col.end()), 0.0);
        EXPECT_EQ(*std::max_element(col.begin(), col.end()), 1.0);
      }
    }
  }
}

QuarterSnapshot aum_snapshot(const std::vector<double>& aums) {
  std::string rows;
  for (std::size_t i = 0; i < aums.size(); ++i)
    rows += "2021Q1,H" + std::to_string(i) + ",F1," + std::to_string(aums[i]) +
            ",Equity,passive,X\n";
  return parse(rows).quarters[0];
}

TEST(SegmentTest, MedianSplit) {
  const auto seg = segment_holders(aum_snapshot({3, 1, 4, 2}), 2);
  EXPECT_EQ(seg.assignment, (std::vector<std::size_t>{1, 0, 1, 0}));
}

TEST(SegmentTest, OneSegment) {
  const auto seg = segment_holders(aum_snapshot({3, 1, 4}), 1);
  EXPECT_EQ(seg.assignment, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(SegmentTest, LowerSegmentTakesExtra) {
  const auto seg = segment_holders(aum_snapshot({1, 2, 3, 4, 5}), 2);
  EXPECT_EQ(seg.sizes(), (std::vector<std::size_t>{3, 2}));
}

TEST(SegmentTest, TiesByIndex) {
  const auto seg = segment_holders(aum_snapshot({5, 5, 5, 5}), 2);
  EXPECT_EQ(seg.assignment, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(SegmentTest, OutOfRange) {
  EXPECT_THROW(segment_holders(aum_snapshot({1, 2}), 0), FeatureError);
  EXPECT_THROW(segment_holders(aum_snapshot({1, 2}), 3), FeatureError);
}

}  // namespace
}  // namespace hlrp
