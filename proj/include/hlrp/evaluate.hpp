#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlrp/features.hpp"
#include "hlrp/holdings.hpp"
#include "hlrp/train.hpp"

namespace hlrp {

/// Holders invested in each fund during one quarter (sorted per fund).
struct GroundTruth {
  std::string quarter;
  std::size_t num_holders = 0;
  std::vector<std::vector<std::size_t>> per_fund;
};

GroundTruth ground_truth(const QuarterSnapshot& snapshot);

/// Per fund, holders present at T+1 but not at T. Funds whose difference is
/// empty are left with an empty set and are skipped by evaluate().
GroundTruth newly_added_split(const GroundTruth& truth_t, const GroundTruth& truth_t1);

enum class EvalVariant { AllHolders, NewlyAdded };
std::string_view to_string(EvalVariant variant);

inline const std::vector<std::size_t> kDefaultKs = {50, 100, 200};

/// Returns the top-k holder indices for a fund. exclude_existing asks the
/// recommender to drop holders already invested in the fund at T.
using Recommender =
    std::function<std::vector<std::size_t>(std::size_t fund, std::size_t k, bool exclude_existing)>;

struct FundResult {
  std::size_t fund = 0;
  std::size_t truth_size = 0;
  std::vector<double> hits;  // aligned with EvalReport::ks
};

struct EvalReport {
  std::string recommender;
  EvalVariant variant = EvalVariant::AllHolders;
  std::string fit_quarter;
  std::string truth_quarter;
  std::vector<std::size_t> ks;
  std::vector<double> mean_hits;  // over evaluated funds
  std::vector<FundResult> per_fund;
  std::size_t funds_evaluated = 0;
  std::size_t funds_skipped = 0;
  std::optional<double> test_auc;

  std::optional<double> mean_hits_at(std::size_t k) const;
  /// Flat "key=value" lines.
  std::string to_text() const;
  std::string to_json() const;
};

/// Scores `recommender` against the variant's ground truth. Throws EvalError
/// if the id spaces of the two quarters differ or the model was fit on a
/// quarter at or after the truth quarter.
EvalReport evaluate(const Recommender& recommender, std::string_view recommender_name,
                    std::string_view fit_quarter, const GroundTruth& truth_t,
                    const GroundTruth& truth_t1, std::span<const std::size_t> ks,
                    EvalVariant variant);

/// Adapts a LinkScorer built on the quarter-T graph.
Recommender model_recommender(const LinkScorer& scorer);

/// Cosine baseline over quarter-T features; `segmentation` enables the AUM
/// diversity constraint.
Recommender baseline_recommender(const NodeFeatures& features, const BipartiteGraph& graph_t,
                                 const AumSegmentation* segmentation);

/// Train on quarter T, score both recommenders against T+1 in both variants.
struct TemporalResult {
  TrainedModel model;
  EvalReport model_all;
  EvalReport model_new;
  EvalReport baseline_all;
  EvalReport baseline_new;
};

struct TemporalOptions {
  TrainConfig train;
  std::size_t num_segments = kDefaultSegments;
  std::vector<std::size_t> ks = kDefaultKs;
  bool diversity_constraint = true;
};

TemporalResult run_temporal_evaluation(const HoldingsData& data, std::string_view quarter_t,
                                       std::string_view quarter_t1,
                                       const TemporalOptions& options);

}  // namespace hlrp
