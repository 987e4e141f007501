#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hlrp/graph.hpp"
#include "hlrp/holdings.hpp"
#include "hlrp/matrix.hpp"

namespace hlrp {

/// One one-hot column: an attribute family ("category", "issuer",
/// "strategy") and one of its values.
struct FeatureColumn {
  std::string family;
  std::string value;

  friend auto operator<=>(const FeatureColumn&, const FeatureColumn&) = default;
};

/// Columns ordered lexicographically by (family, value), no duplicates.
struct FeatureSchema {
  std::vector<FeatureColumn> columns;

  std::size_t width() const { return columns.size(); }
  /// Throws FeatureError naming the value when it is not in the schema.
  std::size_t index_of(const std::string& family, const std::string& value) const;
  bool contains(const FeatureColumn& column) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct FeatureMatrix {
  NodeKind kind = NodeKind::Holder;
  Matrix values;  // one row per node, width() columns
};

FeatureSchema build_schema(std::span<const QuarterSnapshot> snapshots);

struct UnscaledFeatures {
  FeatureMatrix holders;
  FeatureMatrix funds;
};

/// Sum over positions of one_hot(position attributes) * market_value, grouped
/// by holder and by fund.
UnscaledFeatures featurize(const QuarterSnapshot& snapshot, const FeatureSchema& schema);

/// Per-column (min, max) fit on one matrix and reusable on later data.
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;

  static MinMaxScaler fit(const Matrix& m);
  /// (x - min) / (max - min) clamped to [0, 1]; constant columns map to 0.
  Matrix transform(const Matrix& m) const;

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;
};

struct ScaledMatrix {
  FeatureMatrix matrix;
  MinMaxScaler scaler;
};

ScaledMatrix min_max_scale(const FeatureMatrix& matrix);

/// Holders ranked by total invested value, cut into quantile groups.
/// Segment 0 holds the smallest AUM.
struct AumSegmentation {
  std::size_t num_segments = 0;
  std::vector<std::size_t> assignment;  // per holder
  std::vector<double> boundaries;       // lowest AUM of segments 1..n-1

  std::vector<std::size_t> sizes() const;
  std::vector<double> proportions() const;
};

inline constexpr std::size_t kDefaultSegments = 4;

AumSegmentation segment_holders(const QuarterSnapshot& snapshot,
                                std::size_t num_segments = kDefaultSegments);

/// Scaled node features for one quarter plus the statistics needed to
/// featurize later quarters without refitting.
struct NodeFeatures {
  std::string quarter;
  FeatureSchema schema;
  MinMaxScaler holder_scaler;
  MinMaxScaler fund_scaler;
  Matrix holders;
  Matrix funds;
};

/// Fits the scalers on `snapshot` and returns its scaled features.
NodeFeatures fit_features(const QuarterSnapshot& snapshot, const FeatureSchema& schema);

/// Featurizes `snapshot` with frozen schema and scalers.
NodeFeatures apply_features(const QuarterSnapshot& snapshot, const FeatureSchema& schema,
                            const MinMaxScaler& holder_scaler, const MinMaxScaler& fund_scaler);

/// Holder-fund graph of one quarter over the shared id space.
BipartiteGraph snapshot_graph(const QuarterSnapshot& snapshot);

}  // namespace hlrp
