#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hlrp/features.hpp"
#include "hlrp/graph.hpp"
#include "hlrp/link_predictor.hpp"
#include "hlrp/sage.hpp"
#include "hlrp/tape.hpp"

namespace hlrp {

enum class TrainingMode {
  Joint,     // encoder and predictor updated together (default)
  Separate,  // encoder trained with a dot-product scorer, frozen, then the MLP
};

std::string_view to_string(TrainingMode mode);
TrainingMode parse_training_mode(std::string_view name);
std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor(std::string_view name);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t embedding_dim = 128;
  std::size_t hidden_dim = 128;
  std::size_t mlp_hidden_dim = 64;
  std::size_t layers = 2;
  AggregatorKind aggregator = AggregatorKind::Gcn;
  std::size_t epochs = 200;
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
  std::size_t fan_out = 0;
  TrainingMode mode = TrainingMode::Joint;
  PredictorKind predictor = PredictorKind::Mlp;

  /// Throws ConfigError for non-positive sizes or rates out of range.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainedModel {
  TrainConfig config;
  SageConfig sage;
  ParamStore params;
  FeatureSchema schema;
  MinMaxScaler holder_scaler;
  MinMaxScaler fund_scaler;
  std::string fit_quarter;
  std::vector<double> loss_curve;
  double test_auc = 0.0;

  SageModel encoder() const { return SageModel(sage); }
  /// Permutation seed used for inference-time encoding.
  std::uint64_t inference_seed() const;
};

/// Positive and negative pairs scored by one loss evaluation.
struct LabeledPairs {
  std::vector<std::size_t> holders;
  std::vector<std::size_t> funds;
  std::vector<int> labels;

  void add(std::size_t holder, std::size_t fund, int label);
};

/// Records encoder -> predictor -> sigmoid -> BCE on `tape` and returns the
/// 1x1 loss. `features` stacks holder rows over fund rows.
Var record_link_loss(Tape& tape, ParamStore& store, const SageModel& encoder,
                     PredictorKind predictor, const MessageGraph& graph, const Matrix& features,
                     const LabeledPairs& pairs, std::uint64_t permutation_seed);

/// Trains encoder and predictor on `graph` after holding out a test split.
TrainedModel train(const BipartiteGraph& graph, const NodeFeatures& features,
                   const TrainConfig& config);

struct RankedHolder {
  std::size_t holder;
  double probability;
  double logit;

  friend bool operator==(const RankedHolder&, const RankedHolder&) = default;
};

/// Scores every holder against a fund using embeddings computed once for a
/// query graph. Immutable after construction.
class LinkScorer {
 public:
  LinkScorer(const TrainedModel& model, const BipartiteGraph& graph,
             const Matrix& holder_features, const Matrix& fund_features);

  EdgeScore score(std::size_t holder, std::size_t fund) const;
  /// Holders by probability descending, ties by index ascending (saturated
  /// probabilities fall back to the logit before the index); holders
  /// adjacent to the fund are removed first when exclude_existing is set.
  std::vector<RankedHolder> rank_holders(std::size_t fund, std::size_t k,
                                         bool exclude_existing) const;
  const Embeddings& embeddings() const { return embeddings_; }

 private:
  PredictorKind predictor_;
  Matrix w1_;
  Matrix w2_;
  BipartiteGraph graph_;
  Embeddings embeddings_;
};

std::vector<RankedHolder> recommend_holders(const TrainedModel& model,
                                            const BipartiteGraph& graph,
                                            const Matrix& holder_features,
                                            const Matrix& fund_features, std::size_t fund,
                                            std::size_t k, bool exclude_existing);

}  // namespace hlrp
