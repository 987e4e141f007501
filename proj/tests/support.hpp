#pragma once

// Brute-force oracles and random instance generators shared by the unit and
// acceptance tests.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hlrp/features.hpp"
#include "hlrp/holdings.hpp"
#include "hlrp/random.hpp"
#include "hlrp/synthetic.hpp"

namespace hlrp::testing {

/// Random snapshot text with up to `max_rows` rows; duplicate (holder, fund)
/// rows are possible and fund attributes are fixed per fund.
inline std::string random_holdings_csv(Rng& rng, std::size_t max_rows) {
  static const char* kCategories[] = {"Equity", "Bond", "Commodity", "Mixed"};
  static const char* kStrategies[] = {"passive", "active", "smart beta"};
  static const char* kIssuers[] = {"Acme", "Globex", "Initech", "Umbrella, Inc."};
  const std::size_t n_funds = 1 + rng.below(6);
  std::vector<std::array<std::string, 3>> fund_attrs;
  for (std::size_t f = 0; f < n_funds; ++f) {
    fund_attrs.push_back({kCategories[rng.below(4)], kStrategies[rng.below(3)],
                          kIssuers[rng.below(4)]});
  }
  std::ostringstream out;
  out << kHoldingsHeader << "\n";
  const std::size_t rows = 1 + rng.below(max_rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t f = rng.below(n_funds);
    out << "2020Q1,H" << rng.below(8) << ",F" << f << ","
        << static_cast<double>(1 + rng.below(1000000)) / 8.0 << "," << fund_attrs[f][0] << ","
        << fund_attrs[f][1] << ",\"" << fund_attrs[f][2] << "\"\n";
  }
  return out.str();
}

/// Per-node sum of one_hot * value, straight from the position list.
inline UnscaledFeatures brute_force_featurize(const QuarterSnapshot& s,
                                              const FeatureSchema& schema) {
  auto column = [&](const std::string& family, const std::string& value) {
    for (std::size_t j = 0; j < schema.columns.size(); ++j)
      if (schema.columns[j].family == family && schema.columns[j].value == value) return j;
    return schema.columns.size();
  };
  UnscaledFeatures out;
  out.holders.kind = NodeKind::Holder;
  out.funds.kind = NodeKind::Fund;
  out.holders.values = Matrix(s.num_holders, schema.width());
  out.funds.values = Matrix(s.num_funds, schema.width());
  for (const Position& p : s.positions) {
    for (const auto& [family, value] : {std::pair{"category", p.category},
                                        std::pair{"strategy", p.strategy},
                                        std::pair{"issuer", p.issuer}}) {
      const std::size_t j = column(family, value);
      out.holders.values(p.holder, j) += p.market_value;
      out.funds.values(p.fund, j) += p.market_value;
    }
  }
  return out;
}

/// |top-k(ranking) ∩ truth| / min(k, |truth|) by explicit set intersection.
inline double brute_force_hits(const std::vector<std::size_t>& ranking,
                               const std::set<std::size_t>& truth, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) hits += truth.count(ranking[i]);
  return static_cast<double>(hits) / static_cast<double>(std::min(k, truth.size()));
}

/// Quarter-T data of a small synthetic instance, featurized and ready to train.
struct SmallProblem {
  HoldingsData data;
  FeatureSchema schema;
  NodeFeatures features;
  BipartiteGraph graph;
};

inline SmallProblem small_problem(std::uint64_t seed, std::size_t holders = 40,
                                  std::size_t funds = 12) {
  SyntheticConfig cfg;
  cfg.num_holders = holders;
  cfg.num_funds = funds;
  cfg.seed = seed;
  const SyntheticData syn = generate_synthetic(cfg);
  SmallProblem p;
  std::istringstream t(syn.csv_t()), t1(syn.csv_t1());
  parse_holdings(t, p.data);
  parse_holdings(t1, p.data);
  const QuarterSnapshot& q = p.data.quarter(syn.quarter_t);
  p.schema = build_schema(std::span<const QuarterSnapshot>(&q, 1));
  p.features = fit_features(q, p.schema);
  p.graph = snapshot_graph(q);
  return p;
}

}  // namespace hlrp::testing
