#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "hlrp/matrix.hpp"
#include "hlrp/tape.hpp"

namespace hlrp {

struct AdamState {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step_count = 0;
  std::map<std::string, Matrix> first_moment;
  std::map<std::string, Matrix> second_moment;
};

/// One bias-corrected Adam update over every parameter in `params`.
void adam_step(ParamStore& params, AdamState& state);

/// Glorot-uniform matrix in +-sqrt(6 / (rows + cols)).
Matrix init_params(std::size_t rows, std::size_t cols, std::uint64_t seed);

using LossFn = std::function<double(const ParamStore&)>;

/// Central-difference estimate of d loss / d param for every stored entry.
/// Keys mirror the parameter names. `params` is restored before returning.
std::map<std::string, Matrix> finite_difference_grad(const LossFn& loss, ParamStore& params,
                                                     double epsilon = 1e-5);

/// max |analytic - numeric| / max(1, |analytic|) over all entries of one parameter.
double max_relative_error(const Matrix& analytic, const Matrix& numeric);

}  // namespace hlrp
