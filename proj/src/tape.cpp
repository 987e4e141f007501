#include "hlrp/tape.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hlrp/error.hpp"

namespace hlrp {

Parameter& ParamStore::add(const std::string& name, Matrix init) {
  auto [it, inserted] = params_.try_emplace(name);
  if (!inserted) throw Error("ParamStore: duplicate parameter '" + name + "'");
  it->second.grad = Matrix(init.rows(), init.cols());
  it->second.value = std::move(init);
  return it->second;
}

Parameter& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw Error("ParamStore: unknown parameter '" + name + "'");
  return it->second;
}

void ParamStore::zero_grad() {
  for (auto& [_, p] : params_) p.grad.fill(0.0);
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_) n += p.value.size();
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

bool operator==(const ParamStore& a, const ParamStore& b) {
  if (a.params_.size() != b.params_.size()) return false;
  for (auto ia = a.params_.begin(), ib = b.params_.begin(); ia != a.params_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !(ia->second.value == ib->second.value)) return false;
  }
  return true;
}

Var Tape::push(Matrix value, Pullback pullback) {
  nodes_.push_back(Node{std::move(value), std::move(pullback), nullptr});
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw Error("Tape: variable not recorded on this tape");
  return nodes_[v.id];
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

void Tape::accumulate(std::size_t id, Matrix delta) {
  Matrix& g = grads_[id];
  if (g.empty() && !delta.empty()) {
    g = std::move(delta);
    return;
  }
  auto dst = g.data();
  auto src = delta.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void Tape::accumulate(std::size_t id, const Matrix& delta, double scale) {
  Matrix& g = grads_[id];
  if (g.empty()) g = Matrix(delta.rows(), delta.cols());
  auto dst = g.data();
  auto src = delta.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

Var Tape::constant(Matrix value) {
  require_finite(value, "constant");
  return push(std::move(value), nullptr);
}

Var Tape::param(ParamStore& store, const std::string& name) {
  Parameter& p = store.at(name);
  Var v = push(p.value, nullptr);
  nodes_[v.id].param = &p;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  return push(hlrp::matmul(value(a), value(b)), [this, a, b](const Matrix& g) {
    accumulate(a.id, hlrp::matmul_nt(g, value(b)));
    accumulate(b.id, hlrp::matmul_tn(value(a), g));
  });
}

Var Tape::matmul_nt(Var a, Var b) {
  return push(hlrp::matmul_nt(value(a), value(b)), [this, a, b](const Matrix& g) {
    accumulate(a.id, hlrp::matmul(g, value(b)));
    accumulate(b.id, hlrp::matmul_tn(g, value(a)));
  });
}

Var Tape::transpose(Var a) {
  return push(hlrp::transpose(value(a)),
              [this, a](const Matrix& g) { accumulate(a.id, hlrp::transpose(g)); });
}

Var Tape::add(Var a, Var b) {
  return push(hlrp::add(value(a), value(b)), [this, a, b](const Matrix& g) {
    accumulate(a.id, g, 1.0);
    accumulate(b.id, g, 1.0);
  });
}

Var Tape::add_row(Var a, Var row) {
  return push(hlrp::add_row(value(a), value(row)), [this, a, row](const Matrix& g) {
    accumulate(a.id, g, 1.0);
    Matrix col_sums(1, g.cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) col_sums(0, j) += g(i, j);
    accumulate(row.id, std::move(col_sums));
  });
}

Var Tape::multiply(Var a, Var b) {
  return push(hlrp::multiply(value(a), value(b)), [this, a, b](const Matrix& g) {
    accumulate(a.id, hlrp::multiply(g, value(b)));
    accumulate(b.id, hlrp::multiply(g, value(a)));
  });
}

Var Tape::affine(Var a, double scale, double shift) {
  return push(hlrp::affine(value(a), scale, shift),
              [this, a, scale](const Matrix& g) { accumulate(a.id, g, scale); });
}

Var Tape::relu(Var a) {
  for (double x : value(a).data()) kink_distance_ = std::min(kink_distance_, std::abs(x));
  return push(hlrp::relu(value(a)), [this, a](const Matrix& g) {
    Matrix d = g;
    auto x = value(a).data();
    auto dd = d.data();
    for (std::size_t i = 0; i < dd.size(); ++i)
      if (!(x[i] > 0.0)) dd[i] = 0.0;
    accumulate(a.id, std::move(d));
  });
}

Var Tape::sigmoid(Var a) {
  Var out = push(hlrp::sigmoid(value(a)), nullptr);
  nodes_[out.id].pullback = [this, a, out](const Matrix& g) {
    Matrix d = g;
    auto y = value(out).data();
    auto dd = d.data();
    for (std::size_t i = 0; i < dd.size(); ++i) dd[i] *= y[i] * (1.0 - y[i]);
    accumulate(a.id, std::move(d));
  };
  return out;
}

Var Tape::tanh(Var a) {
  Var out = push(hlrp::tanh(value(a)), nullptr);
  nodes_[out.id].pullback = [this, a, out](const Matrix& g) {
    Matrix d = g;
    auto y = value(out).data();
    auto dd = d.data();
    for (std::size_t i = 0; i < dd.size(); ++i) dd[i] *= 1.0 - y[i] * y[i];
    accumulate(a.id, std::move(d));
  };
  return out;
}

Var Tape::log(Var a) {
  return push(hlrp::log(value(a)), [this, a](const Matrix& g) {
    Matrix d = g;
    auto x = value(a).data();
    auto dd = d.data();
    for (std::size_t i = 0; i < dd.size(); ++i) dd[i] /= x[i];
    accumulate(a.id, std::move(d));
  });
}

Var Tape::clamp(Var a, double lo, double hi) {
  return push(hlrp::clamp(value(a), lo, hi), [this, a, lo, hi](const Matrix& g) {
    Matrix d = g;
    auto x = value(a).data();
    auto dd = d.data();
    for (std::size_t i = 0; i < dd.size(); ++i)
      if (x[i] < lo || x[i] > hi) dd[i] = 0.0;
    accumulate(a.id, std::move(d));
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const std::size_t split = value(a).cols();
  return push(hlrp::concat_cols(value(a), value(b)), [this, a, b, split](const Matrix& g) {
    accumulate(a.id, hlrp::slice_cols(g, 0, split));
    accumulate(b.id, hlrp::slice_cols(g, split, g.cols()));
  });
}

Var Tape::concat_rows(Var a, Var b) {
  const std::size_t split = value(a).rows();
  return push(hlrp::concat_rows(value(a), value(b)), [this, a, b, split](const Matrix& g) {
    accumulate(a.id, hlrp::slice_rows(g, 0, split));
    accumulate(b.id, hlrp::slice_rows(g, split, g.rows()));
  });
}

Var Tape::slice_cols(Var a, std::size_t begin, std::size_t end) {
  return push(hlrp::slice_cols(value(a), begin, end), [this, a, begin](const Matrix& g) {
    const Matrix& x = value(a);
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) d(i, begin + j) = g(i, j);
    accumulate(a.id, std::move(d));
  });
}

Var Tape::slice_rows(Var a, std::size_t begin, std::size_t end) {
  return push(hlrp::slice_rows(value(a), begin, end), [this, a, begin](const Matrix& g) {
    const Matrix& x = value(a);
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) d(begin + i, j) = g(i, j);
    accumulate(a.id, std::move(d));
  });
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> index) {
  Matrix out = hlrp::gather_rows(value(a), index);
  return push(std::move(out), [this, a, index = std::move(index)](const Matrix& g) {
    const Matrix& x = value(a);
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      auto dst = d.row(index[i]);
      auto src = g.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    accumulate(a.id, std::move(d));
  });
}

Var Tape::mean_rows(Var a, const RowGroups& groups) {
  return push(hlrp::mean_rows(value(a), groups), [this, a, groups](const Matrix& g) {
    const Matrix& x = value(a);
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i].empty()) continue;
      const double inv = 1.0 / static_cast<double>(groups[i].size());
      auto src = g.row(i);
      for (std::size_t r : groups[i]) {
        auto dst = d.row(r);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += inv * src[j];
      }
    }
    accumulate(a.id, std::move(d));
  });
}

Var Tape::max_rows(Var a, const RowGroups& groups) {
  const Matrix& in = value(a);
  for (const auto& group : groups) {
    if (group.size() < 2) continue;
    for (std::size_t j = 0; j < in.cols(); ++j) {
      double top = -std::numeric_limits<double>::infinity(), second = top;
      for (std::size_t r : group) {
        const double x = in(r, j);
        if (x > top) {
          second = top;
          top = x;
        } else if (x > second) {
          second = x;
        }
      }
      kink_distance_ = std::min(kink_distance_, top - second);
    }
  }
  return push(hlrp::max_rows(value(a), groups), [this, a, groups](const Matrix& g) {
    const Matrix& x = value(a);
    Matrix d(x.rows(), x.cols());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      if (groups[i].empty()) continue;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        std::size_t best = groups[i].front();
        for (std::size_t r : groups[i])
          if (x(r, j) > x(best, j)) best = r;
        d(best, j) += g(i, j);
      }
    }
    accumulate(a.id, std::move(d));
  });
}

Var Tape::sum(Var a) {
  return push(Matrix(1, 1, hlrp::sum(value(a))), [this, a](const Matrix& g) {
    const Matrix& x = value(a);
    accumulate(a.id, Matrix(x.rows(), x.cols(), g(0, 0)));
  });
}

void Tape::backward(Var loss) {
  if (nodes_.empty()) throw Error("Tape: backward called before any forward computation");
  if (consumed_) throw Error("Tape: backward already run on this tape");
  const Matrix& l = node(loss).value;
  if (l.rows() != 1 || l.cols() != 1) {
    throw ShapeError("Tape: backward requires a 1x1 loss, got " + l.shape_string());
  }
  consumed_ = true;
  grads_.assign(nodes_.size(), Matrix());
  grads_[loss.id] = Matrix(1, 1, 1.0);
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    if (grads_[id].empty()) continue;
    Node& n = nodes_[id];
    if (n.param != nullptr) {
      auto dst = n.param->grad.data();
      auto src = grads_[id].data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    } else if (n.pullback) {
      n.pullback(grads_[id]);
    }
    grads_[id] = Matrix();
  }
}

}  // namespace hlrp
