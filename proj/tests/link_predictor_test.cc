#include "hlrp/link_predictor.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "hlrp/error.hpp"
#include "hlrp/train.hpp"
#include "support.hpp"

namespace hlrp {
namespace {

TEST(ScoreEdgeTest, ZeroWeights) {
  const std::vector<double> u = {1, 2}, v = {3, 4};
  const EdgeScore s = score_edge(u, v, Matrix(3, 4), Matrix(1, 3));
  EXPECT_EQ(s.logit, 0.0);
  EXPECT_EQ(s.probability, 0.5);
}

TEST(ScoreEdgeTest, OneDimensionalByHand) {
  const std::vector<double> u = {1}, v = {1};
  const EdgeScore s = score_edge(u, v, Matrix{{1, 1}}, Matrix{{2}});
  EXPECT_EQ(s.logit, 4.0);
  EXPECT_NEAR(s.probability, 0.9820, 1e-4);
}

TEST(ScoreEdgeTest, NegatedW2FlipsProbability) {
  const std::vector<double> u = {0.3, -1}, v = {2, 0.5};
  const Matrix w1{{1, -2, 0.5, 1}, {0.25, 1, 1, -1}};
  const EdgeScore a = score_edge(u, v, w1, Matrix{{1.5, -0.5}});
  const EdgeScore b = score_edge(u, v, w1, Matrix{{-1.5, 0.5}});
  EXPECT_NEAR(a.probability + b.probability, 1.0, 1e-15);
}

TEST(ScoreEdgeTest, ConcatOrderIsHolderFund) {
  const std::vector<double> u = {1}, v = {0};
  EXPECT_EQ(score_edge(u, v, Matrix{{1, 0}}, Matrix{{1}}).logit, 1.0);
  EXPECT_EQ(score_edge(v, u, Matrix{{1, 0}}, Matrix{{1}}).logit, 0.0);
}

TEST(ScoreEdgeTest, DimensionMismatch) {
  const std::vector<double> u = {1}, v = {1, 2};
  EXPECT_THROW(score_edge(u, v, Matrix{{1, 1}}, Matrix{{1}}), ShapeError);
}

TEST(ScorePairsTest, BatchedMatchesPerEdge) {
  Rng rng(4);
  const MlpPredictor mlp(3, 5);
  ParamStore store;
  mlp.register_params(store, 7);
  Matrix hu(4, 3), fv(2, 3);
  for (double& x : hu.data()) x = rng.uniform(-1, 1);
  for (double& x : fv.data()) x = rng.uniform(-1, 1);
  Tape tape;
  Var logits = mlp.score_pairs(tape, store, tape.constant(hu), tape.constant(fv), {0, 3, 2}, {1, 0, 1});
  const std::size_t hs[] = {0, 3, 2}, fs[] = {1, 0, 1};
  for (std::size_t i = 0; i < 3; ++i) {
    const EdgeScore s =
        score_edge(hu.row(hs[i]), fv.row(fs[i]), store.at(MlpPredictor::kW1).value,
                   store.at(MlpPredictor::kW2).value);
    EXPECT_NEAR(tape.value(logits)(i, 0), s.logit, 1e-14);
  }
}

TEST(BceTest, Examples) {
  const double p1[] = {1.0, 0.0};
  const int y1[] = {1, 0};
  EXPECT_LE(bce_loss(p1, y1), 1e-11);
  const double p2[] = {0.5, 0.5};
  EXPECT_NEAR(bce_loss(p2, y1), 0.693147, 1e-6);
  const double p3[] = {0.9};
  const int y3[] = {0};
  EXPECT_NEAR(bce_loss(p3, y3), 2.302585, 1e-6);
}

TEST(BceTest, LengthMismatch) {
  const double p[] = {0.5, 0.5};
  const int y[] = {1};
  EXPECT_THROW(bce_loss(p, y), ShapeError);
}

TEST(BceTest, NonNegativeAndTapeAgrees) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> p(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform();
      y[i] = rng.bernoulli(0.5);
    }
    const double loss = bce_loss(p, y);
    EXPECT_GE(loss, 0.0);
    Tape tape;
    Matrix col(n, 1, std::vector<double>(p));
    EXPECT_NEAR(tape.value(bce_loss(tape, tape.constant(col), y))(0, 0), loss, 1e-12);
  }
}

TrainConfig small_config(std::uint64_t seed) {
  TrainConfig c;
  c.embedding_dim = 8;
  c.hidden_dim = 8;
  c.mlp_hidden_dim = 8;
  c.epochs = 15;
  c.seed = seed;
  return c;
}

TEST(TrainTest, ZeroEpochs) {
  const auto p = testing::small_problem(1);
  TrainConfig c = small_config(1);
  c.epochs = 0;
  const TrainedModel m = train(p.graph, p.features, c);
  EXPECT_TRUE(m.loss_curve.empty());
  EXPECT_TRUE(m.params.contains(MlpPredictor::kW1));
  EXPECT_TRUE(m.params.contains("sage.1.W"));
}

TEST(TrainTest, BitIdenticalAcrossRuns) {
  const auto p = testing::small_problem(2);
  for (AggregatorKind kind : {AggregatorKind::Gcn, AggregatorKind::Lstm}) {
    TrainConfig c = small_config(2);
    c.aggregator = kind;
    const TrainedModel a = train(p.graph, p.features, c);
    const TrainedModel b = train(p.graph, p.features, c);
    EXPECT_EQ(a.loss_curve, b.loss_curve);
    EXPECT_TRUE(a.params == b.params);
    EXPECT_EQ(a.test_auc, b.test_auc);
  }
}

TEST(TrainTest, LossDecreases) {
  const auto p = testing::small_problem(3);
  TrainConfig c = small_config(3);
  c.epochs = 60;
  const TrainedModel m = train(p.graph, p.features, c);
  ASSERT_EQ(m.loss_curve.size(), 60u);
  EXPECT_LT(m.loss_curve.back(), m.loss_curve.front());
}

TEST(TrainTest, SeparateModeTrainsBothPhases) {
  const auto p = testing::small_problem(4);
  TrainConfig c = small_config(4);
  c.mode = TrainingMode::Separate;
  const TrainedModel m = train(p.graph, p.features, c);
  EXPECT_EQ(m.loss_curve.size(), 15u);
  c.predictor = PredictorKind::Dot;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(TrainTest, InvalidConfig) {
  TrainConfig c;
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.test_fraction = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RecommendTest, SingleHolder) {
  const auto p = testing::small_problem(5);
  const TrainedModel m = train(p.graph, p.features, small_config(5));
  const std::vector<Edge> edges = {{0, 0}};
  const BipartiteGraph one = build_graph(1, 1, edges);
  const auto ranked = recommend_holders(m, one, slice_rows(p.features.holders, 0, 1),
                                        slice_rows(p.features.funds, 0, 1), 0, 5, false);
  ASSERT_EQ(ranked.size(), 1u);
  EXPECT_EQ(ranked[0].holder, 0u);
}

TEST(RecommendTest, ExcludeAllInvested) {
  const auto p = testing::small_problem(5);
  const TrainedModel m = train(p.graph, p.features, small_config(5));
  std::vector<Edge> edges;
  for (std::size_t h = 0; h < p.graph.num_holders(); ++h) edges.push_back({h, 0});
  const BipartiteGraph full = build_graph(p.graph.num_holders(), p.graph.num_funds(), edges);
  EXPECT_TRUE(
      recommend_holders(m, full, p.features.holders, p.features.funds, 0, 10, true).empty());
}

TEST(RecommendTest, SortedTruncatedAndExcluding) {
  const auto p = testing::small_problem(6);
  const TrainedModel m = train(p.graph, p.features, small_config(6));
  const LinkScorer scorer(m, p.graph, p.features.holders, p.features.funds);
  for (std::size_t f = 0; f < p.graph.num_funds(); ++f) {
    for (bool exclude : {false, true}) {
      const auto r = scorer.rank_holders(f, 15, exclude);
      EXPECT_LE(r.size(), 15u);
      for (std::size_t i = 1; i < r.size(); ++i) {
        const bool ordered =
            r[i - 1].probability > r[i].probability ||
            (r[i - 1].probability == r[i].probability &&
             (r[i - 1].logit > r[i].logit ||
              (r[i - 1].logit == r[i].logit && r[i - 1].holder < r[i].holder)));
        EXPECT_TRUE(ordered);
        EXPECT_GE(r[i - 1].logit, r[i].logit);
      }
      if (exclude)
        for (const auto& x : r) EXPECT_FALSE(p.graph.has_edge(x.holder, f));
    }
  }
  EXPECT_THROW(scorer.rank_holders(p.graph.num_funds(), 5, false), Error);
}

}  // namespace
}  // namespace hlrp
