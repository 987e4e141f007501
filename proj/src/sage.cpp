#include "hlrp/sage.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "hlrp/error.hpp"
#include "hlrp/optim.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

namespace {

constexpr const char* kLstmGates[] = {"i", "f", "o", "c"};

// Seeded order of a node's neighbourhood, keyed by (seed, layer, node) so the
// result does not depend on evaluation order.
std::vector<std::size_t> permuted(const std::vector<std::size_t>& nbrs, std::uint64_t seed,
                                  std::size_t layer, std::size_t node) {
  std::vector<std::size_t> out = nbrs;
  Rng rng(mix_seed(mix_seed(seed, layer), node));
  rng.shuffle(out);
  return out;
}

}  // namespace

std::string_view to_string(AggregatorKind kind) {
  switch (kind) {
    case AggregatorKind::Mean: return "mean";
    case AggregatorKind::Pool: return "pool";
    case AggregatorKind::Gcn: return "gcn";
    case AggregatorKind::Lstm: return "lstm";
  }
  return "unknown";
}

AggregatorKind parse_aggregator(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "mean") return AggregatorKind::Mean;
  if (lower == "pool") return AggregatorKind::Pool;
  if (lower == "gcn") return AggregatorKind::Gcn;
  if (lower == "lstm") return AggregatorKind::Lstm;
  throw ConfigError("unknown aggregator '" + std::string(name) + "'");
}

MessageGraph MessageGraph::from(const BipartiteGraph& graph) {
  MessageGraph g;
  g.num_holders = graph.num_holders();
  g.num_funds = graph.num_funds();
  g.neighbors.resize(g.num_holders + g.num_funds);
  for (std::size_t h = 0; h < g.num_holders; ++h) {
    for (std::size_t f : graph.holder_neighbors(h)) g.neighbors[h].push_back(g.num_holders + f);
  }
  for (std::size_t f = 0; f < g.num_funds; ++f) {
    auto nbrs = graph.fund_neighbors(f);
    g.neighbors[g.num_holders + f].assign(nbrs.begin(), nbrs.end());
  }
  return g;
}

SageModel::SageModel(SageConfig config) : config_(config) {
  if (config_.input_dim == 0 || config_.hidden_dim == 0 || config_.output_dim == 0 ||
      config_.num_layers == 0) {
    throw ConfigError("SageModel: dimensions and layer count must be positive");
  }
}

std::size_t SageModel::layer_input_dim(std::size_t layer) const {
  return layer == 0 ? config_.input_dim : config_.hidden_dim;
}

std::size_t SageModel::layer_output_dim(std::size_t layer) const {
  return layer + 1 == config_.num_layers ? config_.output_dim : config_.hidden_dim;
}

std::string SageModel::param_name(std::size_t layer, std::string_view name) {
  return "sage." + std::to_string(layer) + "." + std::string(name);
}

void SageModel::register_params(ParamStore& store, std::uint64_t seed) const {
  std::uint64_t key = 0;
  for (std::size_t k = 0; k < config_.num_layers; ++k) {
    const std::size_t in = layer_input_dim(k);
    const std::size_t out = layer_output_dim(k);
    const std::size_t w_cols = config_.kind == AggregatorKind::Gcn ? in : 2 * in;
    store.add(param_name(k, "W"), init_params(out, w_cols, mix_seed(seed, key++)));
    if (config_.kind == AggregatorKind::Pool) {
      store.add(param_name(k, "pool_W"), init_params(in, in, mix_seed(seed, key++)));
      store.add(param_name(k, "pool_b"), Matrix(1, in));
    }
    if (config_.kind == AggregatorKind::Lstm) {
      for (const char* gate : kLstmGates) {
        store.add(param_name(k, std::string("lstm_W_") + gate),
                  init_params(in, 2 * in, mix_seed(seed, key++)));
        store.add(param_name(k, std::string("lstm_b_") + gate), Matrix(1, in));
      }
    }
  }
}

Var SageModel::aggregate_rows(Tape& tape, ParamStore& store, std::size_t layer, Var h,
                              const RowGroups& neighbors, std::uint64_t seed) const {
  switch (config_.kind) {
    case AggregatorKind::Mean:
      return tape.mean_rows(h, neighbors);

    case AggregatorKind::Gcn: {
      RowGroups inclusive(neighbors.size());
      for (std::size_t v = 0; v < neighbors.size(); ++v) {
        inclusive[v].reserve(neighbors[v].size() + 1);
        inclusive[v].push_back(v);
        inclusive[v].insert(inclusive[v].end(), neighbors[v].begin(), neighbors[v].end());
      }
      return tape.mean_rows(h, inclusive);
    }

    case AggregatorKind::Pool: {
      Var proj = tape.matmul_nt(h, tape.param(store, param_name(layer, "pool_W")));
      Var gated = tape.sigmoid(tape.add_row(proj, tape.param(store, param_name(layer, "pool_b"))));
      return tape.max_rows(gated, neighbors);
    }

    case AggregatorKind::Lstm: {
      const std::size_t n = neighbors.size();
      const std::size_t dim = tape.value(h).cols();
      // Nodes sorted by degree (descending) so that the nodes still consuming
      // input at step t form a prefix of the state matrices.
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return neighbors[a].size() > neighbors[b].size();
      });
      std::vector<std::vector<std::size_t>> sequences(n);
      for (std::size_t p = 0; p < n; ++p) {
        sequences[p] = permuted(neighbors[order[p]], seed, layer, order[p]);
      }
      Var w[4], b[4];
      for (int g = 0; g < 4; ++g) {
        w[g] = tape.param(store, param_name(layer, std::string("lstm_W_") + kLstmGates[g]));
        b[g] = tape.param(store, param_name(layer, std::string("lstm_b_") + kLstmGates[g]));
      }
      Var hidden = tape.constant(Matrix(n, dim));
      Var cell = tape.constant(Matrix(n, dim));
      const std::size_t max_len = n == 0 ? 0 : sequences.front().size();
      for (std::size_t t = 0; t < max_len; ++t) {
        std::size_t active = 0;
        std::vector<std::size_t> inputs;
        while (active < n && sequences[active].size() > t) {
          inputs.push_back(sequences[active][t]);
          ++active;
        }
        Var x = tape.gather_rows(h, std::move(inputs));
        Var h_prev = active == n ? hidden : tape.slice_rows(hidden, 0, active);
        Var c_prev = active == n ? cell : tape.slice_rows(cell, 0, active);
        Var z = tape.concat_cols(x, h_prev);
        auto gate = [&](int g) { return tape.add_row(tape.matmul_nt(z, w[g]), b[g]); };
        Var in_gate = tape.sigmoid(gate(0));
        Var forget_gate = tape.sigmoid(gate(1));
        Var out_gate = tape.sigmoid(gate(2));
        Var candidate = tape.tanh(gate(3));
        Var c_new = tape.add(tape.multiply(forget_gate, c_prev), tape.multiply(in_gate, candidate));
        Var h_new = tape.multiply(out_gate, tape.tanh(c_new));
        if (active == n) {
          hidden = h_new;
          cell = c_new;
        } else {
          hidden = tape.concat_rows(h_new, tape.slice_rows(hidden, active, n));
          cell = tape.concat_rows(c_new, tape.slice_rows(cell, active, n));
        }
      }
      std::vector<std::size_t> position(n);
      for (std::size_t p = 0; p < n; ++p) position[order[p]] = p;
      return tape.gather_rows(hidden, std::move(position));
    }
  }
  throw ConfigError("unknown aggregator kind");
}

Var SageModel::forward(Tape& tape, ParamStore& store, const MessageGraph& graph, Var features,
                       std::uint64_t permutation_seed) const {
  const Matrix& x = tape.value(features);
  if (x.cols() != config_.input_dim || x.rows() != graph.num_nodes()) {
    throw ShapeError("SageModel: features " + x.shape_string() + " do not match " +
                     std::to_string(graph.num_nodes()) + " nodes of width " +
                     std::to_string(config_.input_dim));
  }
  Var h = features;
  for (std::size_t k = 0; k < config_.num_layers; ++k) {
    const RowGroups* nbrs = &graph.neighbors;
    RowGroups sampled;
    if (config_.fan_out > 0) {
      sampled.resize(graph.num_nodes());
      for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
        if (graph.neighbors[v].size() <= config_.fan_out) {
          sampled[v] = graph.neighbors[v];
        } else {
          sampled[v] = permuted(graph.neighbors[v], mix_seed(permutation_seed, 0xfa4), k, v);
          sampled[v].resize(config_.fan_out);
          std::sort(sampled[v].begin(), sampled[v].end());
        }
      }
      nbrs = &sampled;
    }
    Var agg = aggregate_rows(tape, store, k, h, *nbrs, permutation_seed);
    Var combined = config_.kind == AggregatorKind::Gcn ? agg : tape.concat_cols(h, agg);
    Var out = tape.matmul_nt(combined, tape.param(store, param_name(k, "W")));
    h = k + 1 == config_.num_layers ? out : tape.relu(out);
  }
  return h;
}

Embeddings SageModel::encode(ParamStore& store, const BipartiteGraph& graph,
                             const Matrix& holder_features, const Matrix& fund_features,
                             std::uint64_t permutation_seed) const {
  if (holder_features.rows() != graph.num_holders() || fund_features.rows() != graph.num_funds()) {
    throw ShapeError("encode: feature rows " + holder_features.shape_string() + "/" +
                     fund_features.shape_string() + " do not match graph with " +
                     std::to_string(graph.num_holders()) + " holders and " +
                     std::to_string(graph.num_funds()) + " funds");
  }
  const auto mg = MessageGraph::from(graph);
  Tape tape;
  Var x = tape.constant(concat_rows(holder_features, fund_features));
  const Matrix& out = tape.value(forward(tape, store, mg, x, permutation_seed));
  return Embeddings{slice_rows(out, 0, graph.num_holders()),
                    slice_rows(out, graph.num_holders(), out.rows())};
}

std::vector<double> aggregate(const SageModel& model, ParamStore& store, std::size_t layer,
                              std::span<const double> self_vec,
                              const std::vector<std::vector<double>>& neighbor_vecs,
                              std::uint64_t permutation_seed) {
  const std::size_t dim = model.layer_input_dim(layer);
  if (self_vec.size() != dim) {
    throw ShapeError("aggregate: self vector has dimension " + std::to_string(self_vec.size()) +
                     ", layer expects " + std::to_string(dim));
  }
  Matrix rows(1 + neighbor_vecs.size(), dim);
  std::copy(self_vec.begin(), self_vec.end(), rows.row(0).begin());
  RowGroups groups(rows.rows());
  for (std::size_t i = 0; i < neighbor_vecs.size(); ++i) {
    if (neighbor_vecs[i].size() != dim) {
      throw ShapeError("aggregate: neighbour " + std::to_string(i) + " has dimension " +
                       std::to_string(neighbor_vecs[i].size()) + ", layer expects " +
                       std::to_string(dim));
    }
    std::copy(neighbor_vecs[i].begin(), neighbor_vecs[i].end(), rows.row(i + 1).begin());
    groups[0].push_back(i + 1);
  }
  Tape tape;
  Var h = tape.constant(std::move(rows));
  Var agg = model.aggregate_rows(tape, store, layer, h, groups, permutation_seed);
  auto r = tape.value(agg).row(0);
  return {r.begin(), r.end()};
}

}  // namespace hlrp
