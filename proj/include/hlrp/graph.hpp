#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hlrp {

enum class NodeKind { Holder, Fund };

struct NodeRef {
  NodeKind kind;
  std::size_t index;
};

struct Edge {
  std::size_t holder;
  std::size_t fund;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct LabeledEdge {
  std::size_t holder;
  std::size_t fund;
  int label;

  friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Undirected holder-fund graph. Immutable after construction; adjacency
/// lists and the edge list are sorted ascending.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  std::size_t num_holders() const { return holder_adj_.size(); }
  std::size_t num_funds() const { return fund_adj_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const std::size_t> holder_neighbors(std::size_t holder) const;
  std::span<const std::size_t> fund_neighbors(std::size_t fund) const;

  bool has_edge(std::size_t holder, std::size_t fund) const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  friend BipartiteGraph build_graph(std::size_t, std::size_t, std::span<const Edge>);

  std::vector<std::vector<std::size_t>> holder_adj_;
  std::vector<std::vector<std::size_t>> fund_adj_;
  std::vector<Edge> edges_;
};

/// Deduplicates and sorts `edges`. Throws GraphError naming the first pair
/// with an out-of-range index.
BipartiteGraph build_graph(std::size_t num_holders, std::size_t num_funds,
                           std::span<const Edge> edges);

/// Opposite-kind neighbours of `node`, ascending.
std::span<const std::size_t> neighbors(const BipartiteGraph& graph, NodeRef node);

/// Label-0 pairs absent from `graph`, drawn by corrupting the fund side of
/// each positive edge. Distinct; at most round(ratio * |E|) of them.
std::vector<LabeledEdge> sample_negative_edges(const BipartiteGraph& graph,
                                               double count_per_positive, std::uint64_t seed);

struct EdgeSplit {
  std::vector<Edge> train_pos;
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::uint64_t seed = 0;
};

/// Uniform random partition of the positive edges plus an equal number of
/// test negatives disjoint from every positive.
EdgeSplit split_edges(const BipartiteGraph& graph, double test_fraction, std::uint64_t seed);

}  // namespace hlrp
