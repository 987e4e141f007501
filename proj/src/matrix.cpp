#include "hlrp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlrp/error.hpp"

namespace hlrp {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

template <class F>
Matrix map(const Matrix& a, const char* op, F f) {
  Matrix out(a.rows(), a.cols());
  auto src = a.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  require_finite(out, op);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                     " does not match " + shape_string());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << '(' << rows_ << 'x' << cols_ << ')';
  return os.str();
}

void require_finite(const Matrix& m, const char* op) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite result");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  require_finite(out, "matmul");
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_tn: shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto arow = a.row(r);
    auto brow = b.row(r);
    for (std::size_t i = 0; i < arow.size(); ++i) {
      const double s = arow[i];
      if (s == 0.0) continue;
      auto dst = out.row(i);
      for (std::size_t j = 0; j < brow.size(); ++j) dst[j] += s * brow[j];
    }
  }
  require_finite(out, "matmul_tn");
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto brow = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < arow.size(); ++k) acc += arow[k] * brow[k];
      out(i, j) = acc;
    }
  }
  require_finite(out, "matmul_nt");
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  require_finite(out, "add");
  return out;
}

Matrix add_row(const Matrix& a, const Matrix& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError("add_row: shape mismatch " + a.shape_string() + " vs " +
                     row.shape_string());
  }
  Matrix out = a;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += row(0, j);
  }
  require_finite(out, "add_row");
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "multiply");
  Matrix out = a;
  auto dst = out.data();
  auto src = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= src[i];
  require_finite(out, "multiply");
  return out;
}

Matrix affine(const Matrix& a, double scale, double shift) {
  return map(a, "affine", [=](double x) { return scale * x + shift; });
}

Matrix relu(const Matrix& a) {
  return map(a, "relu", [](double x) { return x > 0.0 ? x : 0.0; });
}

Matrix sigmoid(const Matrix& a) {
  return map(a, "sigmoid", [](double x) { return sigmoid(x); });
}

Matrix tanh(const Matrix& a) {
  return map(a, "tanh", [](double x) { return std::tanh(x); });
}

Matrix log(const Matrix& a) {
  return map(a, "log", [](double x) { return std::log(x); });
}

Matrix clamp(const Matrix& a, double lo, double hi) {
  return map(a, "clamp", [=](double x) { return std::clamp(x, lo, hi); });
}

Matrix concat_cols(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("concat_cols: shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), dst.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), dst.begin() + a.cols());
  }
  return out;
}

Matrix concat_rows(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("concat_rows: shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
  std::vector<double> data(a.data().begin(), a.data().end());
  data.insert(data.end(), b.data().begin(), b.data().end());
  return Matrix(a.rows() + b.rows(), a.cols(), std::move(data));
}

Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.cols()) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") out of " + a.shape_string());
  }
  Matrix out(a.rows(), end - begin);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto src = a.row(i);
    std::copy(src.begin() + begin, src.begin() + end, out.row(i).begin());
  }
  return out;
}

Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end) {
  if (begin > end || end > a.rows()) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") out of " + a.shape_string());
  }
  auto src = a.data();
  return Matrix(end - begin, a.cols(),
                std::vector<double>(src.begin() + begin * a.cols(), src.begin() + end * a.cols()));
}

Matrix gather_rows(const Matrix& a, std::span<const std::size_t> index) {
  Matrix out(index.size(), a.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= a.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(index[i]) + " out of " +
                       a.shape_string());
    }
    auto src = a.row(index[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix mean_rows(const Matrix& a, const RowGroups& groups) {
  Matrix out(groups.size(), a.cols());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) continue;
    auto dst = out.row(i);
    for (std::size_t r : groups[i]) {
      if (r >= a.rows()) {
        throw ShapeError("mean_rows: row " + std::to_string(r) + " out of " + a.shape_string());
      }
      auto src = a.row(r);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    const double inv = 1.0 / static_cast<double>(groups[i].size());
    for (double& v : dst) v *= inv;
  }
  require_finite(out, "mean_rows");
  return out;
}

Matrix max_rows(const Matrix& a, const RowGroups& groups) {
  Matrix out(groups.size(), a.cols());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) continue;
    auto dst = out.row(i);
    bool first = true;
    for (std::size_t r : groups[i]) {
      if (r >= a.rows()) {
        throw ShapeError("max_rows: row " + std::to_string(r) + " out of " + a.shape_string());
      }
      auto src = a.row(r);
      for (std::size_t j = 0; j < dst.size(); ++j) {
        if (first || src[j] > dst[j]) dst[j] = src[j];
      }
      first = false;
    }
  }
  return out;
}

double sum(const Matrix& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  return acc;
}

}  // namespace hlrp
