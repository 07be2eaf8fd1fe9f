#pragma once

// Central-finite-difference gradient checking against the tape. The relative
// error denominator is floored at 1e-3 so dead entries (both sides ~0) do not
// blow up the ratio; everything live is compared at full strength.

#include <algorithm>
#include <cmath>
#include <vector>

#include "avgraph/matrix.hpp"
#include "avgraph/tape.hpp"

namespace fd {

inline double rel_err(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-3});
  return std::abs(analytic - numeric) / denom;
}

// build(tape, leaves) must return a 1x1 scalar Val built from the leaves.
template <typename Build>
double max_rel_grad_error(Build&& build, std::vector<avgraph::Matrix> inputs,
                          double step = 1e-4) {
  using avgraph::Matrix;
  using avgraph::Tape;
  using avgraph::Val;

  std::vector<Matrix> analytic;
  {
    Tape t;
    std::vector<Val> leaves;
    leaves.reserve(inputs.size());
    for (const auto& m : inputs) leaves.push_back(t.leaf(m));
    const Val root = build(t, leaves);
    t.backward(root);
    for (const Val v : leaves) {
      const Matrix& g = t.grad(v);
      analytic.push_back(g.size() == 0
                             ? Matrix(t.value(v).rows(), t.value(v).cols())
                             : g);
    }
  }

  auto eval = [&](const std::vector<Matrix>& in) {
    Tape t;
    std::vector<Val> leaves;
    leaves.reserve(in.size());
    for (const auto& m : in) leaves.push_back(t.leaf(m));
    return t.value(build(t, leaves))(0, 0);
  };

  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      const double saved = inputs[i].data()[k];
      inputs[i].data()[k] = saved + step;
      const double fp = eval(inputs);
      inputs[i].data()[k] = saved - step;
      const double fm = eval(inputs);
      inputs[i].data()[k] = saved;
      const double numeric = (fp - fm) / (2.0 * step);
      worst = std::max(worst, rel_err(analytic[i].data()[k], numeric));
    }
  }
  return worst;
}

}  // namespace fd
