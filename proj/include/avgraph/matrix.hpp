#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace avgraph {

/// Dense row-major matrix of doubles. All numeric state in the library
/// (parameters, activations, gradients) is 64-bit; files narrow to f32.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

[[noreturn]] inline void shape_fail(const char* op, const Matrix& a, const Matrix& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch (" + shape_str(a) +
                              " vs " + shape_str(b) + ")");
}

[[noreturn]] inline void shape_fail(const char* op, const Matrix& a) {
  throw std::invalid_argument(std::string(op) + ": bad shape (" + shape_str(a) + ")");
}

namespace detail {

// dst += A * B over raw row-major buffers, ikj order so the inner loop runs
// across contiguous rows. The k-loop is unrolled by four; a group of four
// zero multipliers is skipped outright, which clips the zero fringe of
// banded adjacencies and the dead half of ReLU activations.
inline void mm_accumulate(double* dst, const double* a, const double* b, std::size_t n,
                          std::size_t k, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * k;
    double* orow = dst + i * m;
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const double a0 = arow[p], a1 = arow[p + 1], a2 = arow[p + 2], a3 = arow[p + 3];
      if (a0 == 0.0 && a1 == 0.0 && a2 == 0.0 && a3 == 0.0) continue;
      const double* b0 = b + p * m;
      const double *b1 = b0 + m, *b2 = b1 + m, *b3 = b2 + m;
      for (std::size_t j = 0; j < m; ++j)
        orow[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
    }
    for (; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = b + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace detail

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_fail("matmul", a, b);
  Matrix out(a.rows(), b.cols());
  detail::mm_accumulate(out.data(), a.data(), b.data(), a.rows(), a.cols(), b.cols());
  return out;
}

/// dst += A * B (gradient hot path).
inline void matmul_acc(Matrix& dst, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) shape_fail("matmul_acc", a, b);
  if (dst.rows() != a.rows() || dst.cols() != b.cols()) shape_fail("matmul_acc", dst, a);
  detail::mm_accumulate(dst.data(), a.data(), b.data(), a.rows(), a.cols(), b.cols());
}

inline Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

inline void add_into(Matrix& dst, const Matrix& src) {
  if (!dst.same_shape(src)) shape_fail("add_into", dst, src);
  double* d = dst.data();
  const double* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

inline void scale_into(Matrix& dst, double k) {
  double* d = dst.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] *= k;
}

}  // namespace avgraph
