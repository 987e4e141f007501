#include "hlrp/train.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hlrp/error.hpp"
#include "hlrp/metrics.hpp"
#include "hlrp/optim.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Seed streams derived from TrainConfig::seed.
enum SeedStream : std::uint64_t {
  kEncoderInit = 1,
  kPredictorInit = 2,
  kSplit = 3,
  kNegatives = 4,
  kPermutation = 5,
  kInference = 6,
};

Var record_pair_loss(Tape& tape, ParamStore& store, PredictorKind predictor, Var holder_emb,
                     Var fund_emb, const LabeledPairs& pairs) {
  Var logits;
  if (predictor == PredictorKind::Mlp) {
    const MlpPredictor mlp(tape.value(holder_emb).cols(),
                           store.at(MlpPredictor::kW1).value.rows());
    logits = mlp.score_pairs(tape, store, holder_emb, fund_emb, pairs.holders, pairs.funds);
  } else {
    logits = dot_score_pairs(tape, holder_emb, fund_emb, pairs.holders, pairs.funds);
  }
  return bce_loss(tape, tape.sigmoid(logits), pairs.labels);
}

LabeledPairs epoch_pairs(const BipartiteGraph& train_graph, const TrainConfig& config,
                         std::size_t epoch) {
  LabeledPairs pairs;
  for (const Edge& e : train_graph.edges()) pairs.add(e.holder, e.fund, 1);
  const auto negatives = sample_negative_edges(
      train_graph, config.negative_ratio, mix_seed(config.seed ^ epoch, kNegatives));
  for (const auto& e : negatives) pairs.add(e.holder, e.fund, 0);
  return pairs;
}

double checked(double loss, std::size_t epoch) {
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "train: non-finite loss " << loss << " at epoch " << epoch + 1;
    throw NumericError(os.str());
  }
  return loss;
}

template <class Step>
double run_epoch(std::size_t epoch, Step step) {
  try {
    return checked(step(), epoch);
  } catch (const NumericError& e) {
    throw NumericError("train: epoch " + std::to_string(epoch + 1) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(TrainingMode mode) {
  return mode == TrainingMode::Joint ? "joint" : "separate";
}

TrainingMode parse_training_mode(std::string_view name) {
  const auto s = lowercase(name);
  if (s == "joint") return TrainingMode::Joint;
  if (s == "separate") return TrainingMode::Separate;
  throw ConfigError("unknown training mode '" + std::string(name) + "'");
}

std::string_view to_string(PredictorKind kind) {
  return kind == PredictorKind::Mlp ? "mlp" : "dot";
}

PredictorKind parse_predictor(std::string_view name) {
  const auto s = lowercase(name);
  if (s == "mlp") return PredictorKind::Mlp;
  if (s == "dot") return PredictorKind::Dot;
  throw ConfigError("unknown predictor '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (embedding_dim == 0 || hidden_dim == 0 || mlp_hidden_dim == 0) {
    throw ConfigError("embedding_dim, hidden_dim and mlp_hidden_dim must be positive");
  }
  if (layers == 0) throw ConfigError("layers must be positive");
  if (!(negative_ratio > 0.0)) throw ConfigError("negative_ratio must be positive");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0, 1)");
  }
  if (mode == TrainingMode::Separate && predictor != PredictorKind::Mlp) {
    throw ConfigError("separate training requires the mlp predictor");
  }
}

std::uint64_t TrainedModel::inference_seed() const { return mix_seed(config.seed, kInference); }

void LabeledPairs::add(std::size_t holder, std::size_t fund, int label) {
  holders.push_back(holder);
  funds.push_back(fund);
  labels.push_back(label);
}

Var record_link_loss(Tape& tape, ParamStore& store, const SageModel& encoder,
                     PredictorKind predictor, const MessageGraph& graph, const Matrix& features,
                     const LabeledPairs& pairs, std::uint64_t permutation_seed) {
  Var emb = encoder.forward(tape, store, graph, tape.constant(features), permutation_seed);
  Var holder_emb = tape.slice_rows(emb, 0, graph.num_holders);
  Var fund_emb = tape.slice_rows(emb, graph.num_holders, graph.num_nodes());
  return record_pair_loss(tape, store, predictor, holder_emb, fund_emb, pairs);
}

TrainedModel train(const BipartiteGraph& graph, const NodeFeatures& features,
                   const TrainConfig& config) {
  config.validate();
  if (graph.num_edges() == 0) throw GraphError("train: graph has no edges");
  if (features.holders.rows() != graph.num_holders() ||
      features.funds.rows() != graph.num_funds() ||
      features.holders.cols() != features.funds.cols()) {
    throw ShapeError("train: features " + features.holders.shape_string() + "/" +
                     features.funds.shape_string() + " do not match the graph");
  }

  TrainedModel model;
  model.config = config;
  model.sage = SageConfig{config.aggregator, features.schema.width(), config.hidden_dim,
                          config.embedding_dim, config.layers, config.fan_out};
  model.schema = features.schema;
  model.holder_scaler = features.holder_scaler;
  model.fund_scaler = features.fund_scaler;
  model.fit_quarter = features.quarter;

  const SageModel encoder(model.sage);
  const MlpPredictor mlp(config.embedding_dim, config.mlp_hidden_dim);
  ParamStore encoder_params;
  ParamStore predictor_params;
  encoder.register_params(encoder_params, mix_seed(config.seed, kEncoderInit));
  if (config.predictor == PredictorKind::Mlp) {
    mlp.register_params(predictor_params, mix_seed(config.seed, kPredictorInit));
  }

  const EdgeSplit split = split_edges(graph, config.test_fraction, mix_seed(config.seed, kSplit));
  const BipartiteGraph train_graph =
      build_graph(graph.num_holders(), graph.num_funds(), split.train_pos);
  const MessageGraph message_graph = MessageGraph::from(train_graph);
  const Matrix stacked = concat_rows(features.holders, features.funds);

  auto merged = [&] {
    ParamStore all = encoder_params;
    for (const auto& [name, p] : predictor_params) all.add(name, p.value);
    return all;
  };

  if (config.mode == TrainingMode::Joint) {
    ParamStore params = merged();
    AdamState adam;
    adam.learning_rate = config.learning_rate;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      model.loss_curve.push_back(run_epoch(epoch, [&] {
        const LabeledPairs pairs = epoch_pairs(train_graph, config, epoch);
        params.zero_grad();
        Tape tape;
        Var loss = record_link_loss(tape, params, encoder, config.predictor, message_graph,
                                    stacked, pairs, mix_seed(config.seed ^ epoch, kPermutation));
        const double value = tape.value(loss)(0, 0);
        tape.backward(loss);
        adam_step(params, adam);
        return value;
      }));
    }
    model.params = std::move(params);
  } else {
    // Phase one fits the encoder through a parameter-free dot-product scorer;
    // phase two fits the MLP on the frozen embeddings.
    const std::size_t encoder_epochs = (config.epochs + 1) / 2;
    AdamState encoder_adam;
    encoder_adam.learning_rate = config.learning_rate;
    for (std::size_t epoch = 0; epoch < encoder_epochs; ++epoch) {
      model.loss_curve.push_back(run_epoch(epoch, [&] {
        const LabeledPairs pairs = epoch_pairs(train_graph, config, epoch);
        encoder_params.zero_grad();
        Tape tape;
        Var loss = record_link_loss(tape, encoder_params, encoder, PredictorKind::Dot,
                                    message_graph, stacked, pairs,
                                    mix_seed(config.seed ^ epoch, kPermutation));
        const double value = tape.value(loss)(0, 0);
        tape.backward(loss);
        adam_step(encoder_params, encoder_adam);
        return value;
      }));
    }
    const Embeddings frozen =
        encoder.encode(encoder_params, train_graph, features.holders, features.funds,
                       mix_seed(config.seed, kInference));
    AdamState mlp_adam;
    mlp_adam.learning_rate = config.learning_rate;
    for (std::size_t epoch = encoder_epochs; epoch < config.epochs; ++epoch) {
      model.loss_curve.push_back(run_epoch(epoch, [&] {
        const LabeledPairs pairs = epoch_pairs(train_graph, config, epoch);
        predictor_params.zero_grad();
        Tape tape;
        Var loss = record_pair_loss(tape, predictor_params, PredictorKind::Mlp,
                                    tape.constant(frozen.holders), tape.constant(frozen.funds),
                                    pairs);
        const double value = tape.value(loss)(0, 0);
        tape.backward(loss);
        adam_step(predictor_params, mlp_adam);
        return value;
      }));
    }
    model.params = merged();
  }

  const LinkScorer scorer(model, train_graph, features.holders, features.funds);
  std::vector<double> pos;
  std::vector<double> neg;
  for (const Edge& e : split.test_pos) pos.push_back(scorer.score(e.holder, e.fund).logit);
  for (const Edge& e : split.test_neg) neg.push_back(scorer.score(e.holder, e.fund).logit);
  model.test_auc = auc(pos, neg);
  return model;
}

LinkScorer::LinkScorer(const TrainedModel& model, const BipartiteGraph& graph,
                       const Matrix& holder_features, const Matrix& fund_features)
    : predictor_(model.config.predictor), graph_(graph) {
  ParamStore params = model.params;
  embeddings_ = model.encoder().encode(params, graph, holder_features, fund_features,
                                       model.inference_seed());
  if (predictor_ == PredictorKind::Mlp) {
    w1_ = model.params.at(MlpPredictor::kW1).value;
    w2_ = model.params.at(MlpPredictor::kW2).value;
  }
}

EdgeScore LinkScorer::score(std::size_t holder, std::size_t fund) const {
  if (holder >= embeddings_.holders.rows() || fund >= embeddings_.funds.rows()) {
    throw GraphError("score: pair (" + std::to_string(holder) + ", " + std::to_string(fund) +
                     ") out of range");
  }
  if (predictor_ == PredictorKind::Mlp) {
    return score_edge(embeddings_.holders.row(holder), embeddings_.funds.row(fund), w1_, w2_);
  }
  auto u = embeddings_.holders.row(holder);
  auto v = embeddings_.funds.row(fund);
  const double logit = std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
  return {logit, sigmoid(logit)};
}

std::vector<RankedHolder> LinkScorer::rank_holders(std::size_t fund, std::size_t k,
                                                   bool exclude_existing) const {
  if (fund >= graph_.num_funds()) {
    throw GraphError("recommend: fund " + std::to_string(fund) + " out of range");
  }
  if (k == 0) throw ConfigError("recommend: K must be at least 1");
  std::vector<RankedHolder> ranked;
  for (std::size_t h = 0; h < graph_.num_holders(); ++h) {
    if (exclude_existing && graph_.has_edge(h, fund)) continue;
    const EdgeScore s = score(h, fund);
    ranked.push_back({h, s.probability, s.logit});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedHolder& a, const RankedHolder& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    if (a.logit != b.logit) return a.logit > b.logit;
    return a.holder < b.holder;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::vector<RankedHolder> recommend_holders(const TrainedModel& model,
                                            const BipartiteGraph& graph,
                                            const Matrix& holder_features,
                                            const Matrix& fund_features, std::size_t fund,
                                            std::size_t k, bool exclude_existing) {
  if (fund >= graph.num_funds()) {
    throw GraphError("recommend: fund " + std::to_string(fund) + " out of range");
  }
  return LinkScorer(model, graph, holder_features, fund_features)
      .rank_holders(fund, k, exclude_existing);
}

}  // namespace hlrp
