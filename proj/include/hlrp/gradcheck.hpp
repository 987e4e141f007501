#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "hlrp/sage.hpp"

namespace hlrp {

/// Problem size for the joint encoder + predictor gradient check.
struct GradCheckOptions {
  std::size_t num_holders = 12;
  std::size_t num_funds = 6;
  std::size_t feature_dim = 8;
  std::size_t layers = 2;
  std::size_t hidden_dim = 16;
  std::size_t embedding_dim = 16;
  std::size_t mlp_hidden_dim = 16;
  double edge_prob = 0.35;
  double epsilon = 1e-5;
  double kink_margin = 10.0;  // in units of epsilon
  std::size_t max_draws = 50;
};

struct GradCheckResult {
  AggregatorKind kind = AggregatorKind::Gcn;
  std::uint64_t seed = 0;
  std::size_t num_values = 0;
  std::size_t draws = 0;
  std::map<std::string, double> max_relative_error;  // per parameter

  double worst() const;
};

/// Compares reverse-mode gradients of the full link-prediction loss against
/// central finite differences on a random graph with random features.
GradCheckResult check_joint_gradients(AggregatorKind kind, std::uint64_t seed,
                                      const GradCheckOptions& options = {});

}  // namespace hlrp
