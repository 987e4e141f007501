#include "hlrp/metrics.hpp"

#include <algorithm>

#include "hlrp/error.hpp"

namespace hlrp {

std::optional<double> hits_at_k(std::span<const std::size_t> recommended,
                                std::span<const std::size_t> truth, std::size_t k) {
  if (k == 0) throw EvalError("hits_at_k: K must be at least 1");
  if (truth.empty()) return std::nullopt;
  const std::size_t top = std::min(k, recommended.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < top; ++i) {
    hits += std::binary_search(truth.begin(), truth.end(), recommended[i]) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(std::min(k, truth.size()));
}

double auc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw EvalError("auc: both positive and negative scores are required");
  }
  // Rank-based count: for each positive, negatives strictly below plus half
  // the ties.
  std::vector<double> neg(neg_scores.begin(), neg_scores.end());
  std::sort(neg.begin(), neg.end());
  double correct = 0.0;
  for (double p : pos_scores) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    correct += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return correct / (static_cast<double>(pos_scores.size()) * static_cast<double>(neg.size()));
}

}  // namespace hlrp
