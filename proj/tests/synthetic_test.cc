#include "hlrp/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "hlrp/error.hpp"

namespace hlrp {
namespace {

std::set<std::pair<std::string, std::string>> edge_set(const std::vector<Position>& ps) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& p : ps) out.insert({p.holder_id, p.fund_id});
  return out;
}

TEST(SyntheticTest, NoCrossStyleEdges) {
  SyntheticConfig c;
  c.cross_style_edge_prob = 0.0;
  c.seed = 3;
  const SyntheticData d = generate_synthetic(c);
  for (const auto* ps : {&d.positions_t, &d.positions_t1})
    for (const Position& p : *ps) {
      const auto h = std::find(d.holder_ids.begin(), d.holder_ids.end(), p.holder_id) -
                     d.holder_ids.begin();
      const auto f = std::find(d.fund_ids.begin(), d.fund_ids.end(), p.fund_id) -
                     d.fund_ids.begin();
      EXPECT_EQ(d.holder_style[h], d.fund_style[f]);
    }
}

TEST(SyntheticTest, FullPersistenceKeepsEdges) {
  SyntheticConfig c;
  c.persistence = 1.0;
  c.new_holder_fraction = 0.0;
  c.seed = 4;
  const SyntheticData d = generate_synthetic(c);
  const auto t = edge_set(d.positions_t), t1 = edge_set(d.positions_t1);
  EXPECT_TRUE(std::includes(t1.begin(), t1.end(), t.begin(), t.end()));
  EXPECT_EQ(d.num_fresh_holders, 0u);
}

TEST(SyntheticTest, WithinBlockDensity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticConfig c;
    c.seed = seed;
    const SyntheticData d = generate_synthetic(c);
    std::map<std::string, std::size_t> hi, fi;
    for (std::size_t i = 0; i < d.holder_ids.size(); ++i) hi[d.holder_ids[i]] = i;
    for (std::size_t i = 0; i < d.fund_ids.size(); ++i) fi[d.fund_ids[i]] = i;
    double within_pairs = 0, within_edges = 0;
    for (std::size_t h = 0; h < c.num_holders; ++h)
      for (std::size_t f = 0; f < c.num_funds; ++f)
        within_pairs += d.holder_style[h] == d.fund_style[f];
    for (const auto& p : d.positions_t)
      within_edges += d.holder_style[hi[p.holder_id]] == d.fund_style[fi[p.fund_id]];
    const double density = within_edges / within_pairs;
    EXPECT_GT(density, 0.25 * 0.8) << seed;
    EXPECT_LT(density, 0.25 * 1.2) << seed;
  }
}

TEST(SyntheticTest, Deterministic) {
  SyntheticConfig c;
  c.seed = 8;
  EXPECT_EQ(generate_synthetic(c).csv_t1(), generate_synthetic(c).csv_t1());
  SyntheticConfig other = c;
  other.seed = 9;
  EXPECT_NE(generate_synthetic(c).csv_t(), generate_synthetic(other).csv_t());
}

TEST(SyntheticTest, MarketValuesAndQuarters) {
  SyntheticConfig c;
  c.base_quarter = "2021Q4";
  const SyntheticData d = generate_synthetic(c);
  EXPECT_EQ(d.quarter_t, "2021Q4");
  EXPECT_EQ(d.quarter_t1, "2022Q1");
  for (const auto& p : d.positions_t) {
    EXPECT_GE(p.market_value, 1e5);
    EXPECT_LE(p.market_value, 1e9);
  }
  EXPECT_GT(d.num_fresh_holders, 0u);
  EXPECT_EQ(d.holder_ids.size(), c.num_holders + d.num_fresh_holders);
}

TEST(SyntheticTest, InvalidConfig) {
  SyntheticConfig c;
  c.within_style_edge_prob = 1.5;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = SyntheticConfig{};
  c.num_styles = 0;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
  c = SyntheticConfig{};
  c.new_holder_fraction = 1.0;
  EXPECT_THROW(generate_synthetic(c), ConfigError);
}

}  // namespace
}  // namespace hlrp
