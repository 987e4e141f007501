#include "hlrp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "hlrp/error.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

namespace {

constexpr int kRejectionAttempts = 100;

std::string pair_string(const Edge& e) {
  return "(" + std::to_string(e.holder) + ", " + std::to_string(e.fund) + ")";
}

}  // namespace

BipartiteGraph build_graph(std::size_t num_holders, std::size_t num_funds,
                           std::span<const Edge> edges) {
  BipartiteGraph g;
  g.holder_adj_.resize(num_holders);
  g.fund_adj_.resize(num_funds);
  g.edges_.assign(edges.begin(), edges.end());
  for (const Edge& e : g.edges_) {
    if (e.holder >= num_holders || e.fund >= num_funds) {
      throw GraphError("build_graph: edge " + pair_string(e) + " out of range for " +
                       std::to_string(num_holders) + " holders and " +
                       std::to_string(num_funds) + " funds");
    }
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
  // Edges are sorted by (holder, fund), so holder lists come out sorted; fund
  // lists are filled in holder order and are sorted as well.
  for (const Edge& e : g.edges_) {
    g.holder_adj_[e.holder].push_back(e.fund);
    g.fund_adj_[e.fund].push_back(e.holder);
  }
  return g;
}

std::span<const std::size_t> BipartiteGraph::holder_neighbors(std::size_t holder) const {
  if (holder >= holder_adj_.size()) {
    throw GraphError("holder " + std::to_string(holder) + " out of range");
  }
  return holder_adj_[holder];
}

std::span<const std::size_t> BipartiteGraph::fund_neighbors(std::size_t fund) const {
  if (fund >= fund_adj_.size()) throw GraphError("fund " + std::to_string(fund) + " out of range");
  return fund_adj_[fund];
}

bool BipartiteGraph::has_edge(std::size_t holder, std::size_t fund) const {
  if (holder >= holder_adj_.size()) return false;
  const auto& adj = holder_adj_[holder];
  return std::binary_search(adj.begin(), adj.end(), fund);
}

std::span<const std::size_t> neighbors(const BipartiteGraph& graph, NodeRef node) {
  return node.kind == NodeKind::Holder ? graph.holder_neighbors(node.index)
                                       : graph.fund_neighbors(node.index);
}

namespace {

std::size_t non_edge_count(const BipartiteGraph& graph) {
  return graph.num_holders() * graph.num_funds() - graph.num_edges();
}

std::vector<LabeledEdge> draw_negatives(const BipartiteGraph& graph, std::size_t target,
                                        std::uint64_t seed) {
  const std::size_t holders = graph.num_holders();
  const std::size_t funds = graph.num_funds();
  const auto& positives = graph.edges();
  target = std::min(target, non_edge_count(graph));
  Rng rng(seed);
  std::set<Edge> chosen;
  std::vector<LabeledEdge> out;
  out.reserve(target);
  auto usable = [&](std::size_t h, std::size_t f) {
    return !graph.has_edge(h, f) && chosen.count(Edge{h, f}) == 0;
  };
  auto take = [&](std::size_t h, std::size_t f) {
    chosen.insert(Edge{h, f});
    out.push_back(LabeledEdge{h, f, 0});
  };

  for (std::size_t i = 0; out.size() < target; ++i) {
    const std::size_t h = positives[i % positives.size()].holder;
    bool found = false;
    for (int attempt = 0; attempt < kRejectionAttempts && !found; ++attempt) {
      const std::size_t f = rng.below(funds);
      if (usable(h, f)) {
        take(h, f);
        found = true;
      }
    }
    if (found) continue;

    std::vector<std::size_t> candidates;
    for (std::size_t f = 0; f < funds; ++f)
      if (usable(h, f)) candidates.push_back(f);
    if (!candidates.empty()) {
      take(h, candidates[rng.below(candidates.size())]);
      continue;
    }
    // This holder is saturated; fall back to the global non-edge pool.
    std::vector<Edge> global;
    for (std::size_t hh = 0; hh < holders; ++hh)
      for (std::size_t f = 0; f < funds; ++f)
        if (usable(hh, f)) global.push_back(Edge{hh, f});
    const Edge e = global[rng.below(global.size())];
    take(e.holder, e.fund);
  }
  return out;
}

}  // namespace

std::vector<LabeledEdge> sample_negative_edges(const BipartiteGraph& graph,
                                               double count_per_positive, std::uint64_t seed) {
  if (non_edge_count(graph) == 0) {
    throw GraphError("sample_negative_edges: no negative edges available");
  }
  if (!(count_per_positive >= 0.0)) {
    throw GraphError("sample_negative_edges: ratio must be non-negative");
  }
  const auto target = static_cast<std::size_t>(
      std::llround(count_per_positive * static_cast<double>(graph.num_edges())));
  return draw_negatives(graph, target, seed);
}

EdgeSplit split_edges(const BipartiteGraph& graph, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw GraphError("split_edges: test_fraction must lie in (0, 1), got " +
                     std::to_string(test_fraction));
  }
  const std::size_t n = graph.num_edges();
  const auto n_test =
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) {
    throw GraphError("split_edges: " + std::to_string(n) + " edges are too few for fraction " +
                     std::to_string(test_fraction));
  }

  EdgeSplit split;
  split.seed = seed;
  std::vector<Edge> shuffled = graph.edges();
  Rng rng(mix_seed(seed, 0));
  rng.shuffle(shuffled);
  split.test_pos.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train_pos.assign(shuffled.begin() + static_cast<std::ptrdiff_t>(n_test), shuffled.end());
  std::sort(split.test_pos.begin(), split.test_pos.end());
  std::sort(split.train_pos.begin(), split.train_pos.end());

  // Negatives are checked against the full graph, so they are disjoint from
  // both train and test positives.
  if (non_edge_count(graph) < n_test) {
    throw GraphError("split_edges: not enough non-edges for " + std::to_string(n_test) +
                     " test negatives");
  }
  const auto negatives = draw_negatives(graph, n_test, mix_seed(seed, 1));
  for (const auto& e : negatives) split.test_neg.push_back(Edge{e.holder, e.fund});
  return split;
}

}  // namespace hlrp
