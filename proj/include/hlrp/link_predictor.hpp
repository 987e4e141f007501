#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hlrp/matrix.hpp"
#include "hlrp/tape.hpp"

namespace hlrp {

enum class PredictorKind { Mlp, Dot };

/// Edge scorer logit = W2 * relu(W1 * concat(holder, fund)), no biases.
/// Parameters are "mlp.W1" (hidden x 2d) and "mlp.W2" (1 x hidden).
class MlpPredictor {
 public:
  static constexpr const char* kW1 = "mlp.W1";
  static constexpr const char* kW2 = "mlp.W2";

  MlpPredictor(std::size_t embedding_dim, std::size_t hidden_dim);

  std::size_t embedding_dim() const { return embedding_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }

  void register_params(ParamStore& store, std::uint64_t seed) const;

  /// Logits (n x 1) for pairs (holders[i], funds[i]) drawn from the holder
  /// and fund embedding matrices.
  Var score_pairs(Tape& tape, ParamStore& store, Var holder_emb, Var fund_emb,
                  std::vector<std::size_t> holders, std::vector<std::size_t> funds) const;

 private:
  std::size_t embedding_dim_;
  std::size_t hidden_dim_;
};

/// Row-wise dot products of paired embeddings; only used by the comparison
/// and separate-training paths.
Var dot_score_pairs(Tape& tape, Var holder_emb, Var fund_emb, std::vector<std::size_t> holders,
                    std::vector<std::size_t> funds);

struct EdgeScore {
  double logit;
  double probability;
};

EdgeScore score_edge(std::span<const double> holder_emb, std::span<const double> fund_emb,
                     const Matrix& w1, const Matrix& w2);

inline constexpr double kProbabilityClamp = 1e-12;

/// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> probabilities, std::span<const int> labels);

/// Recorded form of bce_loss; `probabilities` is n x 1, labels are constants.
Var bce_loss(Tape& tape, Var probabilities, std::span<const int> labels);

}  // namespace hlrp
