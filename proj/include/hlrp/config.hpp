#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hlrp/features.hpp"
#include "hlrp/synthetic.hpp"
#include "hlrp/train.hpp"

namespace hlrp {

/// Everything a CLI run can be configured with. Loaded from a flat JSON
/// document (with a nested "synthetic" block); command-line flags override.
struct RunConfig {
  TrainConfig train;
  SyntheticConfig synthetic;
  std::vector<std::string> data;  // holdings CSV paths
  std::string checkpoint = "model.hlrp";
  std::string report = "report.json";
  std::string loss_curve = "loss_curve.csv";
  std::string out_dir = ".";
  std::string quarter;        // training / query quarter; empty picks the earliest
  std::string truth_quarter;  // empty picks the quarter after `quarter`
  std::size_t num_segments = kDefaultSegments;
  std::vector<std::size_t> ks = {50, 100, 200};

  /// Throws ConfigError on unknown keys or ill-typed values.
  static RunConfig from_json(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string to_json() const;
};

/// Reads HLRP_SEED; nullopt when unset. Throws ConfigError when malformed.
std::optional<std::uint64_t> seed_from_env();

}  // namespace hlrp
