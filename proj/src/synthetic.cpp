#include "hlrp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "hlrp/error.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

namespace {

const std::vector<std::string> kCategories = {
    "US Equity",   "Intl Equity", "Fixed Income", "Municipal",
    "Commodities", "Real Estate", "Multi-Asset",  "Money Market"};
const std::vector<std::string> kStrategies = {"active", "passive", "strategic"};
const std::vector<std::string> kIssuers = {"Issuer-A", "Issuer-B", "Issuer-C", "Issuer-D",
                                           "Issuer-E", "Issuer-F", "Issuer-G", "Issuer-H",
                                           "Issuer-I", "Issuer-J", "Issuer-K", "Issuer-L"};

struct FundAttributes {
  std::string category;
  std::string strategy;
  std::string issuer;
};

// Draws from the style's palette (per_style consecutive values starting at
// style * per_style) with probability fidelity, else from the full list.
const std::string& draw_attribute(Rng& rng, const std::vector<std::string>& values,
                                  std::size_t style, std::size_t per_style, double fidelity) {
  if (rng.bernoulli(fidelity)) {
    return values[(style * per_style + rng.below(per_style)) % values.size()];
  }
  return values[rng.below(values.size())];
}

std::string make_id(char prefix, std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, n);
  return buf;
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string("synthetic: ") + name + " must lie in [0, 1]");
  }
}

}  // namespace

void SyntheticConfig::validate() const {
  if (num_holders == 0 || num_funds == 0 || num_styles == 0) {
    throw ConfigError("synthetic: num_holders, num_funds and num_styles must be positive");
  }
  check_probability(within_style_edge_prob, "within_style_edge_prob");
  check_probability(cross_style_edge_prob, "cross_style_edge_prob");
  check_probability(persistence, "persistence");
  check_probability(attribute_fidelity, "attribute_fidelity");
  if (!(new_holder_fraction >= 0.0 && new_holder_fraction < 1.0)) {
    throw ConfigError("synthetic: new_holder_fraction must lie in [0, 1)");
  }
  if (within_style_edge_prob <= cross_style_edge_prob && num_styles > 1) {
    throw ConfigError("synthetic: within_style_edge_prob must exceed cross_style_edge_prob");
  }
  quarter_ordinal(base_quarter);
}

std::string next_quarter(const std::string& label) {
  const int ord = quarter_ordinal(label) + 1;
  return std::to_string(ord / 4) + "Q" + std::to_string(ord % 4 + 1);
}

std::string SyntheticData::csv_t() const {
  std::ostringstream os;
  write_holdings_csv(os, positions_t);
  return os.str();
}

std::string SyntheticData::csv_t1() const {
  std::ostringstream os;
  write_holdings_csv(os, positions_t1);
  return os.str();
}

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SyntheticData out;
  out.quarter_t = config.base_quarter;
  out.quarter_t1 = next_quarter(config.base_quarter);

  const std::size_t m = config.num_holders;
  const std::size_t n = config.num_funds;
  const double f = config.new_holder_fraction;
  out.num_fresh_holders =
      static_cast<std::size_t>(std::llround(f * static_cast<double>(m) / (1.0 - f)));
  const std::size_t total_holders = m + out.num_fresh_holders;

  for (std::size_t h = 0; h < total_holders; ++h) {
    out.holder_ids.push_back(make_id('H', h, 5));
    out.holder_style.push_back(rng.below(config.num_styles));
  }
  std::vector<FundAttributes> attrs;
  for (std::size_t j = 0; j < n; ++j) {
    out.fund_ids.push_back(make_id('F', j, 4));
    const std::size_t s = rng.below(config.num_styles);
    out.fund_style.push_back(s);
    attrs.push_back({draw_attribute(rng, kCategories, s, 2, config.attribute_fidelity),
                     draw_attribute(rng, kStrategies, s, 1, config.attribute_fidelity),
                     draw_attribute(rng, kIssuers, s, 3, config.attribute_fidelity)});
  }

  auto block_prob = [&](std::size_t h, std::size_t j) {
    return out.holder_style[h] == out.fund_style[j] ? config.within_style_edge_prob
                                                    : config.cross_style_edge_prob;
  };
  // Fallback partner for a node left without edges: a random same-style
  // node of the other kind, or any node when the style block is empty.
  auto partner = [&](std::size_t style, const std::vector<std::size_t>& styles,
                     std::size_t count) {
    std::vector<std::size_t> same;
    for (std::size_t i = 0; i < count; ++i)
      if (styles[i] == style) same.push_back(i);
    return same.empty() ? rng.below(count) : same[rng.below(same.size())];
  };
  auto log_uniform_value = [&] { return std::exp(rng.uniform(std::log(1e5), std::log(1e9))); };

  std::set<std::pair<std::size_t, std::size_t>> edges_t;
  for (std::size_t h = 0; h < m; ++h)
    for (std::size_t j = 0; j < n; ++j)
      if (rng.bernoulli(block_prob(h, j))) edges_t.insert({h, j});
  for (std::size_t h = 0; h < m; ++h) {
    auto it = edges_t.lower_bound({h, 0});
    if (it == edges_t.end() || it->first != h) {
      edges_t.insert({h, partner(out.holder_style[h], out.fund_style, n)});
    }
  }
  std::vector<bool> fund_held(n, false);
  for (const auto& e : edges_t) fund_held[e.second] = true;
  const std::vector<std::size_t> t_styles(out.holder_style.begin(),
                                          out.holder_style.begin() + static_cast<std::ptrdiff_t>(m));
  for (std::size_t j = 0; j < n; ++j) {
    if (!fund_held[j]) edges_t.insert({partner(out.fund_style[j], t_styles, m), j});
  }

  std::map<std::pair<std::size_t, std::size_t>, double> values;
  for (const auto& e : edges_t) values[e] = log_uniform_value();

  // T+1: surviving positions, churn-scaled new positions among existing
  // holders, then fresh holders drawn with the full block probabilities.
  std::set<std::pair<std::size_t, std::size_t>> edges_t1;
  for (const auto& e : edges_t)
    if (rng.bernoulli(config.persistence)) edges_t1.insert(e);
  for (std::size_t h = 0; h < m; ++h) {
    for (std::size_t j = 0; j < n; ++j) {
      if (edges_t.count({h, j}) != 0) continue;
      if (rng.bernoulli(block_prob(h, j) * (1.0 - config.persistence))) edges_t1.insert({h, j});
    }
  }
  for (std::size_t h = m; h < total_holders; ++h) {
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.bernoulli(block_prob(h, j))) {
        edges_t1.insert({h, j});
        any = true;
      }
    }
    if (!any) edges_t1.insert({h, partner(out.holder_style[h], out.fund_style, n)});
  }
  for (const auto& e : edges_t1) {
    if (values.count(e) == 0) values[e] = log_uniform_value();
  }

  auto emit = [&](const std::set<std::pair<std::size_t, std::size_t>>& edges,
                  const std::string& quarter) {
    std::vector<Position> positions;
    for (const auto& [h, j] : edges) {
      Position p;
      p.quarter = quarter;
      p.holder_id = out.holder_ids[h];
      p.fund_id = out.fund_ids[j];
      p.market_value = values.at({h, j});
      p.category = attrs[j].category;
      p.strategy = attrs[j].strategy;
      p.issuer = attrs[j].issuer;
      p.holder = h;
      p.fund = j;
      positions.push_back(std::move(p));
    }
    return positions;
  };
  out.positions_t = emit(edges_t, out.quarter_t);
  out.positions_t1 = emit(edges_t1, out.quarter_t1);
  return out;
}

}  // namespace hlrp
