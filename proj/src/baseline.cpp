#include "hlrp/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlrp/error.hpp"

namespace hlrp {

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ShapeError("cosine_similarity: dimension " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::vector<SimilarHolder> baseline_recommend(std::span<const double> fund_vec,
                                              const Matrix& holder_matrix, std::size_t k,
                                              std::span<const std::size_t> exclude) {
  if (fund_vec.size() != holder_matrix.cols()) {
    throw ShapeError("baseline_recommend: fund vector of dimension " +
                     std::to_string(fund_vec.size()) + " vs holder matrix " +
                     holder_matrix.shape_string());
  }
  std::vector<bool> skip(holder_matrix.rows(), false);
  for (std::size_t h : exclude)
    if (h < skip.size()) skip[h] = true;

  std::vector<SimilarHolder> ranked;
  for (std::size_t h = 0; h < holder_matrix.rows(); ++h) {
    if (!skip[h]) ranked.push_back({h, cosine_similarity(fund_vec, holder_matrix.row(h))});
  }
  std::sort(ranked.begin(), ranked.end(), [](const SimilarHolder& a, const SimilarHolder& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.holder < b.holder;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

SegmentQuota segment_quota(std::span<const double> proportions, std::size_t k) {
  SegmentQuota q;
  q.proportions.assign(proportions.begin(), proportions.end());
  q.counts.assign(proportions.size(), 0);
  std::vector<double> remainder(proportions.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < proportions.size(); ++s) {
    const double exact = proportions[s] * static_cast<double>(k);
    q.counts[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - std::floor(exact);
    assigned += q.counts[s];
  }
  std::vector<std::size_t> order(proportions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < k && !order.empty(); ++i, ++assigned) {
    ++q.counts[order[i % order.size()]];
  }
  return q;
}

std::vector<SimilarHolder> diversity_constrain(const std::vector<SimilarHolder>& ranked,
                                               const AumSegmentation& segmentation,
                                               std::size_t k) {
  if (k == 0) throw ConfigError("diversity_constrain: K must be at least 1");
  for (const auto& r : ranked) {
    if (r.holder >= segmentation.assignment.size()) {
      throw FeatureError("diversity_constrain: holder " + std::to_string(r.holder) +
                         " has no AUM segment");
    }
  }
  const auto quota = segment_quota(segmentation.proportions(), k);
  std::vector<std::size_t> remaining = quota.counts;
  std::vector<bool> picked(ranked.size(), false);
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranked.size() && total < k; ++i) {
    auto& left = remaining[segmentation.assignment[ranked[i].holder]];
    if (left > 0) {
      --left;
      picked[i] = true;
      ++total;
    }
  }
  for (std::size_t i = 0; i < ranked.size() && total < k; ++i) {
    if (!picked[i]) {
      picked[i] = true;
      ++total;
    }
  }
  std::vector<SimilarHolder> out;
  for (std::size_t i = 0; i < ranked.size(); ++i)
    if (picked[i]) out.push_back(ranked[i]);
  return out;
}

}  // namespace hlrp
