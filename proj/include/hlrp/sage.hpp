#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlrp/graph.hpp"
#include "hlrp/matrix.hpp"
#include "hlrp/tape.hpp"

namespace hlrp {

enum class AggregatorKind { Mean, Pool, Gcn, Lstm };

std::string_view to_string(AggregatorKind kind);
/// Accepts "mean", "pool", "gcn", "lstm" (case-insensitive).
AggregatorKind parse_aggregator(std::string_view name);

struct SageConfig {
  AggregatorKind kind = AggregatorKind::Gcn;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 128;
  std::size_t output_dim = 128;
  std::size_t num_layers = 2;
  /// Neighbours kept per node and layer; 0 aggregates the full neighbourhood.
  std::size_t fan_out = 0;
};

/// Holder and fund rows of one forward pass.
struct Embeddings {
  Matrix holders;  // M x d
  Matrix funds;    // N x d
};

/// Adjacency of a bipartite graph over one index space: holders occupy rows
/// [0, M) and funds rows [M, M + N).
struct MessageGraph {
  std::size_t num_holders = 0;
  std::size_t num_funds = 0;
  RowGroups neighbors;

  static MessageGraph from(const BipartiteGraph& graph);
  std::size_t num_nodes() const { return neighbors.size(); }
};

/// Stacked GraphSAGE layers sharing one aggregator kind. Parameters live in a
/// ParamStore under "sage.<layer>.<name>"; the model itself only carries
/// shapes, so one instance can drive several stores.
class SageModel {
 public:
  explicit SageModel(SageConfig config);

  const SageConfig& config() const { return config_; }
  std::size_t layer_input_dim(std::size_t layer) const;
  std::size_t layer_output_dim(std::size_t layer) const;
  static std::string param_name(std::size_t layer, std::string_view name);

  /// Adds Glorot-initialised layer parameters (zero biases) to `store`.
  void register_params(ParamStore& store, std::uint64_t seed) const;

  /// Records the encoder on `tape`. `features` stacks holder rows over fund
  /// rows. Returns the final layer output in the same row layout.
  Var forward(Tape& tape, ParamStore& store, const MessageGraph& graph, Var features,
              std::uint64_t permutation_seed) const;

  Embeddings encode(ParamStore& store, const BipartiteGraph& graph, const Matrix& holder_features,
                    const Matrix& fund_features, std::uint64_t permutation_seed) const;

  /// Aggregate for every row of `h`, where row v aggregates neighbors[v].
  Var aggregate_rows(Tape& tape, ParamStore& store, std::size_t layer, Var h,
                     const RowGroups& neighbors, std::uint64_t seed) const;

 private:
  SageConfig config_;
};

/// Aggregate of one node's neighbourhood using the parameters of `layer`.
/// Mean/Pool/Lstm return a zero vector for an empty neighbourhood and Gcn
/// returns the self vector.
std::vector<double> aggregate(const SageModel& model, ParamStore& store, std::size_t layer,
                              std::span<const double> self_vec,
                              const std::vector<std::vector<double>>& neighbor_vecs,
                              std::uint64_t permutation_seed);

}  // namespace hlrp
