#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "avgraph/matrix.hpp"
#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"

namespace avgraph {

/// Trainable mapping parameters: one 1-d kernel per span s in [2, m] plus a
/// bias each. Kernel for span s has exactly s taps.
class ConvBank {
 public:
  ConvBank(int span, std::vector<Matrix> weights, std::vector<Matrix> biases,
           bool use_bias = true)
      : span_(span), weights_(std::move(weights)), biases_(std::move(biases)),
        use_bias_(use_bias) {
    if (span_ < 2) throw std::invalid_argument("ConvBank: span m must be >= 2");
    if (weights_.size() != static_cast<std::size_t>(span_ - 1) ||
        biases_.size() != static_cast<std::size_t>(span_ - 1))
      throw std::invalid_argument("ConvBank: expected m-1 kernels and biases");
    for (int s = 2; s <= span_; ++s) {
      if (weights_[s - 2].rows() != 1 || weights_[s - 2].cols() != static_cast<std::size_t>(s))
        throw std::invalid_argument("ConvBank: kernel for span " + std::to_string(s) +
                                    " must be 1x" + std::to_string(s));
      if (biases_[s - 2].rows() != 1 || biases_[s - 2].cols() != 1)
        throw std::invalid_argument("ConvBank: bias must be 1x1");
    }
  }

  int span() const { return span_; }
  bool use_bias() const { return use_bias_; }

  const Matrix& weight(int s) const { return weights_[s - 2]; }
  Matrix& weight(int s) { return weights_[s - 2]; }
  const Matrix& bias(int s) const { return biases_[s - 2]; }
  Matrix& bias(int s) { return biases_[s - 2]; }

 private:
  int span_;
  std::vector<Matrix> weights_;  // weights_[s-2] is 1 x s
  std::vector<Matrix> biases_;   // 1 x 1 each
  bool use_bias_;
};

/// Kernel taps uniform in (-sqrt(1/s), +sqrt(1/s)), biases zero.
inline ConvBank init_bank(int span, std::uint64_t seed, bool use_bias = true) {
  if (span < 2) throw std::invalid_argument("init_bank: span m must be >= 2");
  Rng rng(mix_seed(seed, 0x42'41'4e'4bULL));
  std::vector<Matrix> weights, biases;
  for (int s = 2; s <= span; ++s) {
    const double bound = std::sqrt(1.0 / s);
    Matrix w(1, static_cast<std::size_t>(s));
    for (std::size_t t = 0; t < w.cols(); ++t) w(0, t) = rng.uniform(-bound, bound);
    weights.push_back(std::move(w));
    biases.emplace_back(1, 1);
  }
  return ConvBank(span, std::move(weights), std::move(biases), use_bias);
}

/// Symmetric n x n matrix with zero diagonal and bandwidth m-1, stored as one
/// vector per off-diagonal. entry(f, d) addresses (f, f+d) with f 0-based.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t node_count, int span)
      : n_(node_count), span_(span) {
    if (span_ < 2) throw std::invalid_argument("BandedMatrix: span m must be >= 2");
    if (n_ < static_cast<std::size_t>(span_))
      throw std::invalid_argument("BandedMatrix: node count " + std::to_string(n_) +
                                  " < span m " + std::to_string(span_));
    diagonals_.resize(span_ - 1);
    for (int d = 1; d <= span_ - 1; ++d)
      diagonals_[d - 1].assign(n_ - static_cast<std::size_t>(d), 0.0);
  }

  std::size_t node_count() const { return n_; }
  int span() const { return span_; }
  int bandwidth() const { return span_ - 1; }

  std::vector<double>& diagonal(int d) { return diagonals_[d - 1]; }
  const std::vector<double>& diagonal(int d) const { return diagonals_[d - 1]; }

  double& entry(std::size_t f, int d) { return diagonals_[d - 1][f]; }
  double entry(std::size_t f, int d) const { return diagonals_[d - 1][f]; }

  /// Semantic (i, j) lookup over the full symmetric matrix, 0-based.
  double at(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    const std::size_t d = hi - lo;
    if (d > static_cast<std::size_t>(span_ - 1)) return 0.0;
    return diagonals_[d - 1][lo];
  }

  Matrix densify() const {
    Matrix a(n_, n_);
    for (int d = 1; d <= span_ - 1; ++d) {
      const auto& diag = diagonals_[d - 1];
      for (std::size_t f = 0; f < diag.size(); ++f) {
        a(f, f + d) = diag[f];
        a(f + d, f) = diag[f];
      }
    }
    return a;
  }

 private:
  std::size_t n_;
  int span_;
  std::vector<std::vector<double>> diagonals_;  // diagonals_[d-1][f] = (f, f+d)
};

// Forward mapping: for each span s, slide the length-s kernel over the series
// (stride 1) and place the ReLU-clipped response at distance s-1, i.e. between
// the first and last sample the window covers.
inline BandedMatrix avg_forward(const Series& series, const ConvBank& bank) {
  const auto& t = series.values();
  const std::size_t n = t.size();
  const int m = bank.span();
  if (n < static_cast<std::size_t>(m))
    throw std::invalid_argument("avg_forward: series length " + std::to_string(n) +
                                " < span m " + std::to_string(m));

  BandedMatrix out(n, m);
  for (int s = 2; s <= m; ++s) {
    const Matrix& w = bank.weight(s);
    const double b = bank.use_bias() ? bank.bias(s)(0, 0) : 0.0;
    auto& diag = out.diagonal(s - 1);
    for (std::size_t f = 0; f + s <= n; ++f) {
      double acc = b;
      for (int tap = 0; tap < s; ++tap) acc += w(0, tap) * t[f + tap];
      diag[f] = acc > 0.0 ? acc : 0.0;
    }
  }
  return out;
}

/// Gradients of a scalar loss with respect to every bank parameter, given the
/// loss gradient for each banded entry. Shapes mirror the bank itself.
struct ConvBankGrads {
  std::vector<Matrix> weights;  // 1 x s each
  std::vector<Matrix> biases;   // 1 x 1 each
};

inline ConvBankGrads zero_bank_grads(const ConvBank& bank) {
  ConvBankGrads g;
  for (int s = 2; s <= bank.span(); ++s) {
    g.weights.emplace_back(1, static_cast<std::size_t>(s));
    g.biases.emplace_back(1, 1);
  }
  return g;
}

// Reverse pass through the ReLU-gated convolutions. Pre-activations are
// recomputed here; the subgradient at exactly zero is taken as zero.
inline ConvBankGrads avg_backward(const Series& series, const ConvBank& bank,
                                  const BandedMatrix& upstream) {
  const auto& t = series.values();
  const std::size_t n = t.size();
  const int m = bank.span();
  if (upstream.node_count() != n || upstream.span() != m)
    throw std::invalid_argument("avg_backward: upstream is " +
                                std::to_string(upstream.node_count()) + "/m=" +
                                std::to_string(upstream.span()) + ", expected " +
                                std::to_string(n) + "/m=" + std::to_string(m));

  ConvBankGrads grads = zero_bank_grads(bank);
  for (int s = 2; s <= m; ++s) {
    const Matrix& w = bank.weight(s);
    const double b = bank.use_bias() ? bank.bias(s)(0, 0) : 0.0;
    Matrix& gw = grads.weights[s - 2];
    Matrix& gb = grads.biases[s - 2];
    const auto& up = upstream.diagonal(s - 1);
    for (std::size_t f = 0; f + s <= n; ++f) {
      double acc = b;
      for (int tap = 0; tap < s; ++tap) acc += w(0, tap) * t[f + tap];
      if (acc <= 0.0) continue;  // dead ReLU region
      const double g = up[f];
      for (int tap = 0; tap < s; ++tap) gw(0, tap) += g * t[f + tap];
      gb(0, 0) += g;
    }
    if (!bank.use_bias()) gb(0, 0) = 0.0;
  }
  return grads;
}

/// Folds a dense n x n gradient back onto the band: each band entry feeds two
/// mirrored cells of the densified matrix, so their gradients sum.
inline BandedMatrix band_from_dense(const Matrix& dense, int span) {
  if (dense.rows() != dense.cols()) shape_fail("band_from_dense", dense);
  BandedMatrix out(dense.rows(), span);
  for (int d = 1; d <= span - 1; ++d) {
    auto& diag = out.diagonal(d);
    for (std::size_t f = 0; f < diag.size(); ++f)
      diag[f] = dense(f, f + d) + dense(f + d, f);
  }
  return out;
}

}  // namespace avgraph
