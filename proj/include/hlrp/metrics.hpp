#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace hlrp {

/// |top-K(recommended) ∩ truth| / min(K, |truth|). `truth` must be sorted
/// ascending. Returns nullopt for an empty truth set (the caller skips the
/// fund); throws EvalError when k == 0.
std::optional<double> hits_at_k(std::span<const std::size_t> recommended,
                                std::span<const std::size_t> truth, std::size_t k);

/// Mann-Whitney AUC: fraction of (positive, negative) pairs ordered
/// correctly, ties counting one half.
double auc(std::span<const double> pos_scores, std::span<const double> neg_scores);

}  // namespace hlrp
