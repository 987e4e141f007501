#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hlrp/matrix.hpp"

namespace hlrp {

struct Parameter {
  Matrix value;
  Matrix grad;
};

/// Named trainable matrices with gradients of identical shape.
class ParamStore {
 public:
  Parameter& add(const std::string& name, Matrix init);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }

  void zero_grad();
  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;
  std::vector<std::string> names() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  friend bool operator==(const ParamStore& a, const ParamStore& b);

 private:
  std::map<std::string, Parameter> params_;
};

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

/// Records a forward computation over the primitive set and replays it in
/// reverse to accumulate parameter gradients. One tape per forward pass.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a stored parameter; backward() adds into its grad.
  Var param(ParamStore& store, const std::string& name);

  const Matrix& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  /// Smallest distance of any recorded relu input from 0, or of any grouped
  /// max from its runner-up. Finite differences are unreliable below it.
  double kink_distance() const { return kink_distance_; }

  Var matmul(Var a, Var b);
  Var matmul_nt(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);
  Var multiply(Var a, Var b);
  Var affine(Var a, double scale, double shift);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var log(Var a);
  Var clamp(Var a, double lo, double hi);
  Var concat_cols(Var a, Var b);
  Var concat_rows(Var a, Var b);
  Var slice_cols(Var a, std::size_t begin, std::size_t end);
  Var slice_rows(Var a, std::size_t begin, std::size_t end);
  Var gather_rows(Var a, std::vector<std::size_t> index);
  Var mean_rows(Var a, const RowGroups& groups);
  Var max_rows(Var a, const RowGroups& groups);
  Var sum(Var a);

  /// Reverse pass from a 1x1 result. Gradients accumulate into the bound
  /// ParamStore entries; callers zero them between steps.
  void backward(Var loss);

 private:
  using Pullback = std::function<void(const Matrix& grad_out)>;

  struct Node {
    Matrix value;
    Pullback pullback;
    Parameter* param = nullptr;
  };

  Var push(Matrix value, Pullback pullback);
  const Node& node(Var v) const;
  void accumulate(std::size_t id, Matrix delta);
  void accumulate(std::size_t id, const Matrix& delta, double scale);

  std::vector<Node> nodes_;
  std::vector<Matrix> grads_;
  bool consumed_ = false;
  double kink_distance_ = std::numeric_limits<double>::infinity();
};

}  // namespace hlrp
