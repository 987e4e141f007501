#include "hlrp/link_predictor.hpp"

#include <algorithm>
#include <cmath>

#include "hlrp/error.hpp"
#include "hlrp/optim.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

MlpPredictor::MlpPredictor(std::size_t embedding_dim, std::size_t hidden_dim)
    : embedding_dim_(embedding_dim), hidden_dim_(hidden_dim) {
  if (embedding_dim == 0 || hidden_dim == 0) {
    throw ConfigError("MlpPredictor: dimensions must be positive");
  }
}

void MlpPredictor::register_params(ParamStore& store, std::uint64_t seed) const {
  store.add(kW1, init_params(hidden_dim_, 2 * embedding_dim_, mix_seed(seed, 101)));
  store.add(kW2, init_params(1, hidden_dim_, mix_seed(seed, 102)));
}

Var MlpPredictor::score_pairs(Tape& tape, ParamStore& store, Var holder_emb, Var fund_emb,
                              std::vector<std::size_t> holders,
                              std::vector<std::size_t> funds) const {
  if (tape.value(holder_emb).cols() != embedding_dim_ ||
      tape.value(fund_emb).cols() != embedding_dim_) {
    throw ShapeError("MlpPredictor: embeddings must have width " + std::to_string(embedding_dim_));
  }
  // W1 * concat(u, v) == W1[:, :d] * u + W1[:, d:] * v; projecting each node
  // once and gathering per edge avoids materialising the edge concatenation.
  Var w1 = tape.param(store, kW1);
  Var holder_proj = tape.matmul_nt(holder_emb, tape.slice_cols(w1, 0, embedding_dim_));
  Var fund_proj =
      tape.matmul_nt(fund_emb, tape.slice_cols(w1, embedding_dim_, 2 * embedding_dim_));
  Var hidden = tape.relu(tape.add(tape.gather_rows(holder_proj, std::move(holders)),
                                  tape.gather_rows(fund_proj, std::move(funds))));
  return tape.matmul_nt(hidden, tape.param(store, kW2));
}

Var dot_score_pairs(Tape& tape, Var holder_emb, Var fund_emb, std::vector<std::size_t> holders,
                    std::vector<std::size_t> funds) {
  const std::size_t d = tape.value(holder_emb).cols();
  Var prod = tape.multiply(tape.gather_rows(holder_emb, std::move(holders)),
                           tape.gather_rows(fund_emb, std::move(funds)));
  return tape.matmul(prod, tape.constant(Matrix(d, 1, 1.0)));
}

EdgeScore score_edge(std::span<const double> holder_emb, std::span<const double> fund_emb,
                     const Matrix& w1, const Matrix& w2) {
  const std::size_t d = holder_emb.size();
  if (fund_emb.size() != d || w1.cols() != 2 * d || w2.rows() != 1 || w2.cols() != w1.rows()) {
    throw ShapeError("score_edge: embeddings of width " + std::to_string(holder_emb.size()) +
                     "/" + std::to_string(fund_emb.size()) + " do not match W1 " +
                     w1.shape_string() + " and W2 " + w2.shape_string());
  }
  Matrix edge(1, 2 * d);
  std::copy(holder_emb.begin(), holder_emb.end(), edge.row(0).begin());
  std::copy(fund_emb.begin(), fund_emb.end(), edge.row(0).begin() + static_cast<std::ptrdiff_t>(d));
  const double logit = matmul_nt(relu(matmul_nt(edge, w1)), w2)(0, 0);
  return {logit, sigmoid(logit)};
}

double bce_loss(std::span<const double> probabilities, std::span<const int> labels) {
  if (probabilities.size() != labels.size() || labels.empty()) {
    throw ShapeError("bce_loss: " + std::to_string(probabilities.size()) + " probabilities vs " +
                     std::to_string(labels.size()) + " labels");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += labels[i] != 0 ? std::log(p) : std::log(1.0 - p);
  }
  return -total / static_cast<double>(labels.size());
}

Var bce_loss(Tape& tape, Var probabilities, std::span<const int> labels) {
  const Matrix& p = tape.value(probabilities);
  if (p.cols() != 1 || p.rows() != labels.size() || labels.empty()) {
    throw ShapeError("bce_loss: probabilities " + p.shape_string() + " vs " +
                     std::to_string(labels.size()) + " labels");
  }
  Matrix y(labels.size(), 1);
  Matrix not_y(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y(i, 0) = labels[i] != 0 ? 1.0 : 0.0;
    not_y(i, 0) = 1.0 - y(i, 0);
  }
  Var clamped = tape.clamp(probabilities, kProbabilityClamp, 1.0 - kProbabilityClamp);
  Var log_p = tape.log(clamped);
  Var log_not_p = tape.log(tape.affine(clamped, -1.0, 1.0));
  Var total = tape.add(tape.multiply(tape.constant(std::move(y)), log_p),
                       tape.multiply(tape.constant(std::move(not_y)), log_not_p));
  return tape.affine(tape.sum(total), -1.0 / static_cast<double>(labels.size()), 0.0);
}

}  // namespace hlrp
