#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hlrp/holdings.hpp"

namespace hlrp {

/// Planted-style holdings generator: holders and funds belong to investment
/// style blocks, edges are denser within a block, and fund attributes are
/// drawn from style-specific palettes.
struct SyntheticConfig {
  std::size_t num_holders = 200;
  std::size_t num_funds = 60;
  std::size_t num_styles = 4;
  double within_style_edge_prob = 0.25;
  double cross_style_edge_prob = 0.02;
  double persistence = 0.8;
  double new_holder_fraction = 0.1;
  /// Probability that a fund attribute comes from its style's palette rather
  /// than uniformly from all values.
  double attribute_fidelity = 0.6;
  std::string base_quarter = "2021Q3";
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

struct SyntheticData {
  std::string quarter_t;
  std::string quarter_t1;
  std::vector<Position> positions_t;
  std::vector<Position> positions_t1;
  std::vector<std::string> holder_ids;    // T holders followed by fresh T+1 holders
  std::vector<std::size_t> holder_style;  // aligned with holder_ids
  std::vector<std::string> fund_ids;
  std::vector<std::size_t> fund_style;
  std::size_t num_fresh_holders = 0;

  std::string csv_t() const;
  std::string csv_t1() const;
};

SyntheticData generate_synthetic(const SyntheticConfig& config);

/// "2021Q4" -> "2022Q1".
std::string next_quarter(const std::string& label);

}  // namespace hlrp
