#include "hlrp/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "hlrp/baseline.hpp"
#include "hlrp/error.hpp"
#include "hlrp/metrics.hpp"

namespace hlrp {

GroundTruth ground_truth(const QuarterSnapshot& snapshot) {
  GroundTruth t;
  t.quarter = snapshot.quarter;
  t.num_holders = snapshot.num_holders;
  t.per_fund.resize(snapshot.num_funds);
  for (const auto& p : snapshot.positions) t.per_fund[p.fund].push_back(p.holder);
  for (auto& holders : t.per_fund) {
    std::sort(holders.begin(), holders.end());
    holders.erase(std::unique(holders.begin(), holders.end()), holders.end());
  }
  return t;
}

GroundTruth newly_added_split(const GroundTruth& truth_t, const GroundTruth& truth_t1) {
  GroundTruth out;
  out.quarter = truth_t1.quarter;
  out.num_holders = truth_t1.num_holders;
  out.per_fund.resize(truth_t1.per_fund.size());
  for (std::size_t f = 0; f < truth_t1.per_fund.size(); ++f) {
    const auto& now = truth_t1.per_fund[f];
    if (f >= truth_t.per_fund.size()) {
      out.per_fund[f] = now;
      continue;
    }
    const auto& before = truth_t.per_fund[f];
    std::set_difference(now.begin(), now.end(), before.begin(), before.end(),
                        std::back_inserter(out.per_fund[f]));
  }
  return out;
}

std::string_view to_string(EvalVariant variant) {
  return variant == EvalVariant::AllHolders ? "all_holders" : "newly_added";
}

std::optional<double> EvalReport::mean_hits_at(std::size_t k) const {
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (ks[i] == k && funds_evaluated > 0) return mean_hits[i];
  return std::nullopt;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream os;
  os << "recommender=" << recommender << '\n';
  os << "variant=" << to_string(variant) << '\n';
  os << "fit_quarter=" << fit_quarter << '\n';
  os << "truth_quarter=" << truth_quarter << '\n';
  os << "funds_evaluated=" << funds_evaluated << '\n';
  os << "funds_skipped=" << funds_skipped << '\n';
  for (std::size_t i = 0; i < ks.size(); ++i) {
    os << "mean_hits@" << ks[i] << '=' << number(mean_hits[i]) << '\n';
  }
  if (test_auc) os << "test_auc=" << number(*test_auc) << '\n';
  return os.str();
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["recommender"] = recommender;
  j["variant"] = to_string(variant);
  j["fit_quarter"] = fit_quarter;
  j["truth_quarter"] = truth_quarter;
  j["ks"] = ks;
  nlohmann::ordered_json means;
  for (std::size_t i = 0; i < ks.size(); ++i) means["hits@" + std::to_string(ks[i])] = mean_hits[i];
  j["mean_hits"] = means;
  j["funds_evaluated"] = funds_evaluated;
  j["funds_skipped"] = funds_skipped;
  j["test_auc"] = test_auc ? nlohmann::ordered_json(*test_auc) : nlohmann::ordered_json(nullptr);
  auto& funds = j["per_fund"] = nlohmann::ordered_json::array();
  for (const auto& r : per_fund) {
    funds.push_back({{"fund", r.fund}, {"truth_size", r.truth_size}, {"hits", r.hits}});
  }
  return j.dump(2) + "\n";
}

EvalReport evaluate(const Recommender& recommender, std::string_view recommender_name,
                    std::string_view fit_quarter, const GroundTruth& truth_t,
                    const GroundTruth& truth_t1, std::span<const std::size_t> ks,
                    EvalVariant variant) {
  if (truth_t.per_fund.size() != truth_t1.per_fund.size() ||
      truth_t.num_holders != truth_t1.num_holders) {
    throw EvalError("evaluate: quarters " + truth_t.quarter + " and " + truth_t1.quarter +
                    " use different id spaces");
  }
  if (quarter_ordinal(fit_quarter) >= quarter_ordinal(truth_t1.quarter)) {
    throw EvalError("evaluate: model fit on " + std::string(fit_quarter) +
                    " cannot be scored against " + truth_t1.quarter + " ground truth");
  }
  if (ks.empty()) throw EvalError("evaluate: no K values given");
  for (std::size_t k : ks)
    if (k == 0) throw EvalError("evaluate: K must be at least 1");

  EvalReport report;
  report.recommender = recommender_name;
  report.variant = variant;
  report.fit_quarter = fit_quarter;
  report.truth_quarter = truth_t1.quarter;
  report.ks.assign(ks.begin(), ks.end());
  report.mean_hits.assign(ks.size(), 0.0);

  const GroundTruth truth =
      variant == EvalVariant::NewlyAdded ? newly_added_split(truth_t, truth_t1) : truth_t1;
  const bool exclude = variant == EvalVariant::NewlyAdded;
  const std::size_t k_max = *std::max_element(ks.begin(), ks.end());

  for (std::size_t f = 0; f < truth.per_fund.size(); ++f) {
    const auto& expected = truth.per_fund[f];
    if (expected.empty()) {
      ++report.funds_skipped;
      continue;
    }
    const auto ranked = recommender(f, k_max, exclude);
    FundResult r{f, expected.size(), {}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
      r.hits.push_back(*hits_at_k(ranked, expected, ks[i]));
      report.mean_hits[i] += r.hits.back();
    }
    report.per_fund.push_back(std::move(r));
  }
  report.funds_evaluated = report.per_fund.size();
  if (report.funds_evaluated > 0) {
    for (double& m : report.mean_hits) m /= static_cast<double>(report.funds_evaluated);
  }
  return report;
}

Recommender model_recommender(const LinkScorer& scorer) {
  return [&scorer](std::size_t fund, std::size_t k, bool exclude_existing) {
    std::vector<std::size_t> out;
    for (const auto& r : scorer.rank_holders(fund, k, exclude_existing)) out.push_back(r.holder);
    return out;
  };
}

Recommender baseline_recommender(const NodeFeatures& features, const BipartiteGraph& graph_t,
                                 const AumSegmentation* segmentation) {
  return [&features, &graph_t, segmentation](std::size_t fund, std::size_t k,
                                             bool exclude_existing) {
    std::span<const std::size_t> exclude;
    if (exclude_existing) exclude = graph_t.fund_neighbors(fund);
    const std::size_t all = features.holders.rows();
    auto ranked = baseline_recommend(features.funds.row(fund), features.holders, all, exclude);
    if (segmentation != nullptr) {
      ranked = diversity_constrain(ranked, *segmentation, k);
    } else if (ranked.size() > k) {
      ranked.resize(k);
    }
    std::vector<std::size_t> out;
    for (const auto& r : ranked) out.push_back(r.holder);
    return out;
  };
}

TemporalResult run_temporal_evaluation(const HoldingsData& data, std::string_view quarter_t,
                                       std::string_view quarter_t1,
                                       const TemporalOptions& options) {
  const QuarterSnapshot& snap_t = data.quarter(quarter_t);
  const QuarterSnapshot& snap_t1 = data.quarter(quarter_t1);

  // Only quarter-T positions reach the schema, the scalers and training.
  const std::vector<QuarterSnapshot> fit_on = {snap_t};
  const FeatureSchema schema = build_schema(fit_on);
  const NodeFeatures features = fit_features(snap_t, schema);
  const BipartiteGraph graph_t = snapshot_graph(snap_t);
  const AumSegmentation segmentation = segment_holders(snap_t, options.num_segments);

  TemporalResult result;
  result.model = train(graph_t, features, options.train);

  const GroundTruth truth_t = ground_truth(snap_t);
  const GroundTruth truth_t1 = ground_truth(snap_t1);
  const LinkScorer scorer(result.model, graph_t, features.holders, features.funds);
  const auto model_rec = model_recommender(scorer);
  const std::string model_name = "graphsage_" + std::string(to_string(options.train.aggregator)) +
                                 "_" + std::string(to_string(options.train.predictor));
  result.model_all = evaluate(model_rec, model_name, result.model.fit_quarter, truth_t, truth_t1,
                              options.ks, EvalVariant::AllHolders);
  result.model_new = evaluate(model_rec, model_name, result.model.fit_quarter, truth_t, truth_t1,
                              options.ks, EvalVariant::NewlyAdded);
  result.model_all.test_auc = result.model.test_auc;
  result.model_new.test_auc = result.model.test_auc;

  const auto baseline_rec = baseline_recommender(
      features, graph_t, options.diversity_constraint ? &segmentation : nullptr);
  const std::string baseline_name =
      options.diversity_constraint ? "cosine_baseline_diverse" : "cosine_baseline";
  result.baseline_all = evaluate(baseline_rec, baseline_name, snap_t.quarter, truth_t, truth_t1,
                                 options.ks, EvalVariant::AllHolders);
  result.baseline_new = evaluate(baseline_rec, baseline_name, snap_t.quarter, truth_t, truth_t1,
                                 options.ks, EvalVariant::NewlyAdded);
  return result;
}

}  // namespace hlrp
