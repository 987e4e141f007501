#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hlrp {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix row_vector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Neighbour index lists, one per output row, used by the grouped reductions.
using RowGroups = std::vector<std::vector<std::size_t>>;

// Primitive value operations. Shape mismatches raise ShapeError and any
// non-finite result raises NumericError.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix add_row(const Matrix& a, const Matrix& row);  // broadcast 1 x cols
Matrix multiply(const Matrix& a, const Matrix& b);   // elementwise
Matrix affine(const Matrix& a, double scale, double shift);
Matrix relu(const Matrix& a);
Matrix sigmoid(const Matrix& a);
Matrix tanh(const Matrix& a);
Matrix log(const Matrix& a);
Matrix clamp(const Matrix& a, double lo, double hi);
Matrix concat_cols(const Matrix& a, const Matrix& b);
Matrix concat_rows(const Matrix& a, const Matrix& b);
Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t end);
Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end);
Matrix gather_rows(const Matrix& a, std::span<const std::size_t> index);
/// Row i of the result is the mean of a's rows listed in groups[i]; zero when empty.
Matrix mean_rows(const Matrix& a, const RowGroups& groups);
/// Row i of the result is the elementwise max of a's rows in groups[i]; zero when empty.
Matrix max_rows(const Matrix& a, const RowGroups& groups);
double sum(const Matrix& a);

double sigmoid(double x);

void require_finite(const Matrix& m, const char* op);

}  // namespace hlrp
