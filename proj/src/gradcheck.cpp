#include "hlrp/gradcheck.hpp"

#include <algorithm>

#include "hlrp/error.hpp"
#include "hlrp/optim.hpp"
#include "hlrp/random.hpp"
#include "hlrp/train.hpp"

namespace hlrp {

double GradCheckResult::worst() const {
  double w = 0.0;
  for (const auto& [_, e] : max_relative_error) w = std::max(w, e);
  return w;
}

namespace {

struct Problem {
  BipartiteGraph graph;
  MessageGraph message_graph;
  Matrix features;
  LabeledPairs pairs;
  ParamStore params;
  std::uint64_t permutation_seed = 0;
};

Problem draw_problem(const SageModel& encoder, std::uint64_t seed,
                     const GradCheckOptions& options) {
  Problem p;
  Rng rng(mix_seed(seed, 0x9c));
  std::vector<Edge> edges;
  for (std::size_t h = 0; h < options.num_holders; ++h)
    for (std::size_t f = 0; f < options.num_funds; ++f)
      if (rng.bernoulli(options.edge_prob)) edges.push_back({h, f});
  if (edges.empty()) edges.push_back({0, 0});
  p.graph = build_graph(options.num_holders, options.num_funds, edges);
  p.message_graph = MessageGraph::from(p.graph);

  p.features = Matrix(options.num_holders + options.num_funds, options.feature_dim);
  for (double& v : p.features.data()) v = rng.uniform();

  for (const Edge& e : p.graph.edges()) p.pairs.add(e.holder, e.fund, 1);
  for (const auto& e : sample_negative_edges(p.graph, 1.0, mix_seed(seed, 0x9d))) {
    p.pairs.add(e.holder, e.fund, 0);
  }

  encoder.register_params(p.params, mix_seed(seed, 0x9e));
  MlpPredictor(options.embedding_dim, options.mlp_hidden_dim)
      .register_params(p.params, mix_seed(seed, 0x9f));
  // Non-zero biases so their gradients are exercised away from the origin.
  Rng bias_rng(mix_seed(seed, 0xa0));
  for (auto& [name, param] : p.params) {
    if (name.find("_b") != std::string::npos) {
      for (double& v : param.value.data()) v = bias_rng.uniform(-0.5, 0.5);
    }
  }
  p.permutation_seed = mix_seed(seed, 0xa1);
  return p;
}

}  // namespace

GradCheckResult check_joint_gradients(AggregatorKind kind, std::uint64_t seed,
                                      const GradCheckOptions& options) {
  const SageModel encoder(SageConfig{kind, options.feature_dim, options.hidden_dim,
                                     options.embedding_dim, options.layers, 0});
  const double margin = options.kink_margin * options.epsilon;

  GradCheckResult result;
  result.kind = kind;
  result.seed = seed;

  // A relu input or max runner-up within reach of the perturbation makes the
  // central difference straddle a kink; such draws are replaced.
  Problem p;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt == options.max_draws) {
      throw NumericError("gradient check: no kink-free problem after " +
                         std::to_string(attempt) + " draws for seed " + std::to_string(seed));
    }
    p = draw_problem(encoder, mix_seed(seed, attempt), options);
    p.params.zero_grad();
    Tape tape;
    Var loss = record_link_loss(tape, p.params, encoder, PredictorKind::Mlp, p.message_graph,
                                p.features, p.pairs, p.permutation_seed);
    if (tape.kink_distance() < margin) continue;
    tape.backward(loss);
    result.draws = attempt + 1;
    break;
  }

  const LossFn loss_fn = [&](const ParamStore& current) {
    ParamStore copy = current;
    Tape tape;
    Var loss = record_link_loss(tape, copy, encoder, PredictorKind::Mlp, p.message_graph,
                                p.features, p.pairs, p.permutation_seed);
    return tape.value(loss)(0, 0);
  };
  const auto numeric = finite_difference_grad(loss_fn, p.params, options.epsilon);

  result.num_values = p.params.num_values();
  for (const auto& [name, param] : p.params) {
    result.max_relative_error[name] = max_relative_error(param.grad, numeric.at(name));
  }
  return result;
}

}  // namespace hlrp
