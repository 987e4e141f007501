#include "hlrp/optim.hpp"

#include <algorithm>
#include <cmath>

#include "hlrp/error.hpp"
#include "hlrp/random.hpp"

namespace hlrp {

void adam_step(ParamStore& params, AdamState& state) {
  for (auto& [name, p] : params) {
    if (!p.grad.same_shape(p.value)) {
      throw Error("adam_step: missing gradient for '" + name + "'");
    }
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (auto& [name, p] : params) {
    auto [m_it, m_new] = state.first_moment.try_emplace(name, p.value.rows(), p.value.cols());
    auto [v_it, v_new] = state.second_moment.try_emplace(name, p.value.rows(), p.value.cols());
    auto m = m_it->second.data();
    auto v = v_it->second.data();
    auto g = p.grad.data();
    auto theta = p.value.data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
    require_finite(p.value, "adam_step");
  }
}

Matrix init_params(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw ShapeError("init_params: dimensions must be positive");
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
  return m;
}

std::map<std::string, Matrix> finite_difference_grad(const LossFn& loss, ParamStore& params,
                                                     double epsilon) {
  std::map<std::string, Matrix> out;
  for (auto& [name, p] : params) {
    Matrix est(p.value.rows(), p.value.cols());
    auto theta = p.value.data();
    auto dst = est.data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double saved = theta[i];
      theta[i] = saved + epsilon;
      const double plus = loss(params);
      theta[i] = saved - epsilon;
      const double minus = loss(params);
      theta[i] = saved;
      dst[i] = (plus - minus) / (2.0 * epsilon);
    }
    out.emplace(name, std::move(est));
  }
  return out;
}

double max_relative_error(const Matrix& analytic, const Matrix& numeric) {
  if (!analytic.same_shape(numeric)) {
    throw ShapeError("max_relative_error: shape mismatch " + analytic.shape_string() + " vs " +
                     numeric.shape_string());
  }
  double worst = 0.0;
  auto a = analytic.data();
  auto n = numeric.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - n[i]) / std::max(1.0, std::abs(a[i])));
  }
  return worst;
}

}  // namespace hlrp
