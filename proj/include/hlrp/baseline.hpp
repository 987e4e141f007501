#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hlrp/features.hpp"
#include "hlrp/matrix.hpp"

namespace hlrp {

struct SimilarHolder {
  std::size_t holder;
  double similarity;

  friend bool operator==(const SimilarHolder&, const SimilarHolder&) = default;
};

/// u.v / (|u||v|); 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Holders ranked by cosine similarity to `fund_vec` (descending, ties by
/// index), skipping holders listed in `exclude`, truncated to k.
std::vector<SimilarHolder> baseline_recommend(std::span<const double> fund_vec,
                                              const Matrix& holder_matrix, std::size_t k,
                                              std::span<const std::size_t> exclude = {});

struct SegmentQuota {
  std::vector<double> proportions;
  std::vector<std::size_t> counts;
};

/// Largest-remainder apportionment of k slots; equal remainders favour the
/// lower segment.
SegmentQuota segment_quota(std::span<const double> proportions, std::size_t k);

/// Fills each AUM segment's quota with its best-ranked holders, backfills
/// shortfalls from the global ranking and keeps the ranking's order.
std::vector<SimilarHolder> diversity_constrain(const std::vector<SimilarHolder>& ranked,
                                               const AumSegmentation& segmentation,
                                               std::size_t k);

}  // namespace hlrp
