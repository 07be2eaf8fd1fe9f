#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avgraph/matrix.hpp"

namespace avgraph {

/// Named reference to a trainable matrix owned elsewhere.
struct ParamRef {
  std::string name;
  Matrix* value;
};

/// Optimizer state bound to a fixed, ordered parameter list: per-parameter
/// Adam moment accumulators plus the shared step counter.
class ParamStore {
 public:
  explicit ParamStore(std::vector<ParamRef> params) : params_(std::move(params)) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
      m_.emplace_back(p.value->rows(), p.value->cols());
      v_.emplace_back(p.value->rows(), p.value->cols());
    }
  }

  std::size_t size() const { return params_.size(); }
  const ParamRef& param(std::size_t i) const { return params_[i]; }
  Matrix& value(std::size_t i) { return *params_[i].value; }
  const Matrix& value(std::size_t i) const { return *params_[i].value; }
  Matrix& moment1(std::size_t i) { return m_[i]; }
  Matrix& moment2(std::size_t i) { return v_[i]; }
  const Matrix& moment1(std::size_t i) const { return m_[i]; }
  const Matrix& moment2(std::size_t i) const { return v_[i]; }

  std::uint64_t step_count() const { return t_; }
  void set_step_count(std::uint64_t t) { t_ = t; }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i].name == name) return i;
    throw std::invalid_argument("ParamStore: no parameter named " + std::string(name));
  }

  /// Total parameter element count (optimizer state excluded).
  std::size_t element_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value->size();
    return n;
  }

 private:
  friend void adam_step(ParamStore&, const std::vector<Matrix>&, double, double, double, double);
  std::vector<ParamRef> params_;
  std::vector<Matrix> m_, v_;
  std::uint64_t t_ = 0;
};

inline std::vector<Matrix> zero_grads(const ParamStore& store) {
  std::vector<Matrix> g;
  g.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i)
    g.emplace_back(store.value(i).rows(), store.value(i).cols());
  return g;
}

// One Adam update over every bound parameter. Standard bias-corrected
// moments; updates are elementwise so matrix shape never matters beyond
// agreeing with the gradient.
inline void adam_step(ParamStore& store, const std::vector<Matrix>& grads, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  if (grads.size() != store.size())
    throw std::invalid_argument("adam_step: " + std::to_string(grads.size()) +
                                " gradients for " + std::to_string(store.size()) +
                                " parameters");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!grads[i].same_shape(*store.params_[i].value))
      shape_fail(("adam_step[" + store.params_[i].name + "]").c_str(), grads[i],
                 *store.params_[i].value);

  store.t_ += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(store.t_));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(store.t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    double* theta = store.params_[i].value->data();
    double* m = store.m_[i].data();
    double* v = store.v_[i].data();
    const double* g = grads[i].data();
    const std::size_t count = grads[i].size();
    for (std::size_t k = 0; k < count; ++k) {
      m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
      v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      theta[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace avgraph
