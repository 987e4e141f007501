#include "hlrp/features.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hlrp/error.hpp"

namespace hlrp {

namespace {

constexpr const char* kCategory = "category";
constexpr const char* kIssuer = "issuer";
constexpr const char* kStrategy = "strategy";

}  // namespace

std::size_t FeatureSchema::index_of(const std::string& family, const std::string& value) const {
  const FeatureColumn key{family, value};
  auto it = std::lower_bound(columns.begin(), columns.end(), key);
  if (it == columns.end() || *it != key) {
    throw FeatureError("attribute " + family + "='" + value + "' is not in the feature schema");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

bool FeatureSchema::contains(const FeatureColumn& column) const {
  return std::binary_search(columns.begin(), columns.end(), column);
}

FeatureSchema build_schema(std::span<const QuarterSnapshot> snapshots) {
  std::set<FeatureColumn> distinct;
  for (const auto& snap : snapshots) {
    for (const auto& p : snap.positions) {
      distinct.insert({kCategory, p.category});
      distinct.insert({kStrategy, p.strategy});
      distinct.insert({kIssuer, p.issuer});
    }
  }
  if (distinct.empty()) throw FeatureError("build_schema: no positions to derive columns from");
  return FeatureSchema{{distinct.begin(), distinct.end()}};
}

UnscaledFeatures featurize(const QuarterSnapshot& snapshot, const FeatureSchema& schema) {
  UnscaledFeatures out{{NodeKind::Holder, Matrix(snapshot.num_holders, schema.width())},
                       {NodeKind::Fund, Matrix(snapshot.num_funds, schema.width())}};
  for (const auto& p : snapshot.positions) {
    const std::size_t cols[] = {schema.index_of(kCategory, p.category),
                                schema.index_of(kStrategy, p.strategy),
                                schema.index_of(kIssuer, p.issuer)};
    for (std::size_t c : cols) {
      out.holders.values(p.holder, c) += p.market_value;
      out.funds.values(p.fund, c) += p.market_value;
    }
  }
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Matrix& m) {
  if (m.rows() == 0) throw FeatureError("min_max_scale: matrix has no rows");
  MinMaxScaler s;
  s.min.assign(m.row(0).begin(), m.row(0).end());
  s.max = s.min;
  for (std::size_t i = 1; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      s.min[j] = std::min(s.min[j], r[j]);
      s.max[j] = std::max(s.max[j], r[j]);
    }
  }
  return s;
}

Matrix MinMaxScaler::transform(const Matrix& m) const {
  if (m.cols() != min.size()) {
    throw ShapeError("MinMaxScaler: matrix has " + std::to_string(m.cols()) +
                     " columns, scaler has " + std::to_string(min.size()));
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double range = max[j] - min[j];
    if (!(range > 0.0)) continue;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out(i, j) = std::clamp((m(i, j) - min[j]) / range, 0.0, 1.0);
    }
  }
  return out;
}

ScaledMatrix min_max_scale(const FeatureMatrix& matrix) {
  auto scaler = MinMaxScaler::fit(matrix.values);
  return ScaledMatrix{{matrix.kind, scaler.transform(matrix.values)}, std::move(scaler)};
}

std::vector<std::size_t> AumSegmentation::sizes() const {
  std::vector<std::size_t> out(num_segments, 0);
  for (std::size_t s : assignment) ++out[s];
  return out;
}

std::vector<double> AumSegmentation::proportions() const {
  std::vector<double> out;
  for (std::size_t n : sizes()) {
    out.push_back(static_cast<double>(n) / static_cast<double>(assignment.size()));
  }
  return out;
}

AumSegmentation segment_holders(const QuarterSnapshot& snapshot, std::size_t num_segments) {
  const std::size_t m = snapshot.num_holders;
  if (num_segments < 1 || num_segments > m) {
    throw FeatureError("segment_holders: num_segments " + std::to_string(num_segments) +
                       " must lie in [1, " + std::to_string(m) + "]");
  }
  std::vector<double> aum(m, 0.0);
  for (const auto& p : snapshot.positions) aum[p.holder] += p.market_value;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return aum[a] < aum[b]; });

  AumSegmentation seg;
  seg.num_segments = num_segments;
  seg.assignment.assign(m, 0);
  const std::size_t base = m / num_segments;
  const std::size_t extra = m % num_segments;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < num_segments; ++s) {
    const std::size_t count = base + (s < extra ? 1 : 0);
    if (s > 0) seg.boundaries.push_back(aum[order[pos]]);
    for (std::size_t k = 0; k < count; ++k) seg.assignment[order[pos++]] = s;
  }
  return seg;
}

namespace {

NodeFeatures scaled(const QuarterSnapshot& snapshot, const FeatureSchema& schema,
                    MinMaxScaler holder_scaler, MinMaxScaler fund_scaler, const Matrix& h,
                    const Matrix& f) {
  NodeFeatures out;
  out.quarter = snapshot.quarter;
  out.schema = schema;
  out.holders = holder_scaler.transform(h);
  out.funds = fund_scaler.transform(f);
  out.holder_scaler = std::move(holder_scaler);
  out.fund_scaler = std::move(fund_scaler);
  return out;
}

}  // namespace

NodeFeatures fit_features(const QuarterSnapshot& snapshot, const FeatureSchema& schema) {
  auto raw = featurize(snapshot, schema);
  auto hs = MinMaxScaler::fit(raw.holders.values);
  auto fs = MinMaxScaler::fit(raw.funds.values);
  return scaled(snapshot, schema, std::move(hs), std::move(fs), raw.holders.values,
                raw.funds.values);
}

NodeFeatures apply_features(const QuarterSnapshot& snapshot, const FeatureSchema& schema,
                            const MinMaxScaler& holder_scaler, const MinMaxScaler& fund_scaler) {
  auto raw = featurize(snapshot, schema);
  return scaled(snapshot, schema, holder_scaler, fund_scaler, raw.holders.values,
                raw.funds.values);
}

BipartiteGraph snapshot_graph(const QuarterSnapshot& snapshot) {
  std::vector<Edge> edges;
  edges.reserve(snapshot.positions.size());
  for (const auto& p : snapshot.positions) edges.push_back({p.holder, p.fund});
  return build_graph(snapshot.num_holders, snapshot.num_funds, edges);
}

}  // namespace hlrp
