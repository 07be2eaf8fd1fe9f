#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "avgraph/matrix.hpp"

namespace avgraph {

/// Handle into a Tape. Cheap to copy; only valid for the tape that issued it.
struct Val {
  std::uint32_t idx = 0xffffffffu;
};

// Reverse-mode differentiation over a dynamically recorded computation graph.
// Every op evaluates immediately and registers a closure that routes the
// upstream gradient to its inputs; backward() replays the closures in reverse
// creation order. Gradients accumulate additively, so fan-out just works.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Val leaf(Matrix value) { return push(std::move(value), nullptr); }

  const Matrix& value(Val v) const { return nodes_[v.idx].value; }

  /// Gradient of the last backward() root with respect to node v. Zero-shaped
  /// if v did not participate.
  const Matrix& grad(Val v) const { return nodes_[v.idx].grad; }

  std::size_t node_count() const { return nodes_.size(); }

  // ---- ops ----

  Val matmul(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (A.cols() != B.rows()) shape_fail("matmul", A, B);
    return push(avgraph::matmul(A, B), [a, b](Tape& t, const Matrix& g) {
      // dA += G B^T, dB += A^T G; transposing the small operand first keeps
      // both products on the fast contiguous-row kernel
      matmul_acc(t.grad_slot(a), g, avgraph::transpose(t.value(b)));
      matmul_acc(t.grad_slot(b), avgraph::transpose(t.value(a)), g);
    });
  }

  Val transpose(Val a) {
    return push(avgraph::transpose(value(a)), [a](Tape& t, const Matrix& g) {
      t.accumulate(a, avgraph::transpose(g));
    });
  }

  Val add(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (!A.same_shape(B)) shape_fail("add", A, B);
    Matrix out = A;
    add_into(out, B);
    return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
      t.accumulate(a, g);
      t.accumulate(b, g);
    });
  }

  Val sub(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (!A.same_shape(B)) shape_fail("sub", A, B);
    Matrix out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] -= B.data()[i];
    return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
      t.accumulate(a, g);
      Matrix neg = g;
      scale_into(neg, -1.0);
      t.accumulate(b, neg);
    });
  }

  Val elem_mul(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (!A.same_shape(B)) shape_fail("elem_mul", A, B);
    Matrix out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= B.data()[i];
    return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
      Matrix da = g, db = g;
      const Matrix &A2 = t.value(a), &B2 = t.value(b);
      for (std::size_t i = 0; i < g.size(); ++i) {
        da.data()[i] *= B2.data()[i];
        db.data()[i] *= A2.data()[i];
      }
      t.accumulate(a, da);
      t.accumulate(b, db);
    });
  }

  Val scale(Val a, double k) {
    Matrix out = value(a);
    scale_into(out, k);
    return push(std::move(out), [a, k](Tape& t, const Matrix& g) {
      Matrix da = g;
      scale_into(da, k);
      t.accumulate(a, da);
    });
  }

  /// X + row-broadcast bias. X is r x c, bias is 1 x c.
  Val add_bias(Val x, Val bias) {
    const Matrix &X = value(x), &B = value(bias);
    if (B.rows() != 1 || B.cols() != X.cols()) shape_fail("add_bias", X, B);
    Matrix out = X;
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) += B(0, j);
    return push(std::move(out), [x, bias](Tape& t, const Matrix& g) {
      t.accumulate(x, g);
      Matrix db(1, g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) db(0, j) += g(i, j);
      t.accumulate(bias, db);
    });
  }

  Val relu(Val x) {
    Matrix out = value(x);
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out.data()[i] < 0.0) out.data()[i] = 0.0;
    const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size());
    return push(std::move(out), [x, self](Tape& t, const Matrix& g) {
      Matrix dx = g;
      const Matrix& y = t.nodes_[self].value;  // y > 0 iff x > 0
      for (std::size_t i = 0; i < g.size(); ++i)
        if (y.data()[i] <= 0.0) dx.data()[i] = 0.0;
      t.accumulate(x, dx);
    });
  }

  Val row_softmax(Val x) {
    const Matrix& X = value(x);
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i) {
      double mx = X(i, 0);
      for (std::size_t j = 1; j < X.cols(); ++j) mx = std::max(mx, X(i, j));
      double sum = 0.0;
      for (std::size_t j = 0; j < X.cols(); ++j) sum += (out(i, j) = std::exp(X(i, j) - mx));
      for (std::size_t j = 0; j < X.cols(); ++j) out(i, j) /= sum;
    }
    const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size());
    return push(std::move(out), [x, self](Tape& t, const Matrix& g) {
      const Matrix& s = t.nodes_[self].value;
      Matrix dx(g.rows(), g.cols());
      for (std::size_t i = 0; i < g.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < g.cols(); ++j) dot += g(i, j) * s(i, j);
        for (std::size_t j = 0; j < g.cols(); ++j) dx(i, j) = s(i, j) * (g(i, j) - dot);
      }
      t.accumulate(x, dx);
    });
  }

  /// Vertical stack: rows of a followed by rows of b.
  Val concat_rows(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (A.cols() != B.cols()) shape_fail("concat_rows", A, B);
    Matrix out(A.rows() + B.rows(), A.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
      for (std::size_t j = 0; j < A.cols(); ++j) out(i, j) = A(i, j);
    for (std::size_t i = 0; i < B.rows(); ++i)
      for (std::size_t j = 0; j < B.cols(); ++j) out(A.rows() + i, j) = B(i, j);
    return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
      const std::size_t ra = t.value(a).rows();
      Matrix da(ra, g.cols()), db(g.rows() - ra, g.cols());
      for (std::size_t i = 0; i < ra; ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) da(i, j) = g(i, j);
      for (std::size_t i = ra; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) db(i - ra, j) = g(i, j);
      t.accumulate(a, da);
      t.accumulate(b, db);
    });
  }

  /// Horizontal concatenation: columns of a followed by columns of b.
  Val concat_cols(Val a, Val b) {
    const Matrix &A = value(a), &B = value(b);
    if (A.rows() != B.rows()) shape_fail("concat_cols", A, B);
    Matrix out(A.rows(), A.cols() + B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
      for (std::size_t j = 0; j < A.cols(); ++j) out(i, j) = A(i, j);
      for (std::size_t j = 0; j < B.cols(); ++j) out(i, A.cols() + j) = B(i, j);
    }
    return push(std::move(out), [a, b](Tape& t, const Matrix& g) {
      const std::size_t ca = t.value(a).cols();
      Matrix da(g.rows(), ca), db(g.rows(), g.cols() - ca);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < ca; ++j) da(i, j) = g(i, j);
        for (std::size_t j = ca; j < g.cols(); ++j) db(i, j - ca) = g(i, j);
      }
      t.accumulate(a, da);
      t.accumulate(b, db);
    });
  }

  /// Column means, 1 x c.
  Val mean_rows(Val x) {
    const Matrix& X = value(x);
    if (X.rows() == 0) shape_fail("mean_rows", X);
    Matrix out(1, X.cols());
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t j = 0; j < X.cols(); ++j) out(0, j) += X(i, j);
    const double inv = 1.0 / static_cast<double>(X.rows());
    scale_into(out, inv);
    return push(std::move(out), [x, inv](Tape& t, const Matrix& g) {
      const Matrix& X2 = t.value(x);
      Matrix dx(X2.rows(), X2.cols());
      for (std::size_t i = 0; i < dx.rows(); ++i)
        for (std::size_t j = 0; j < dx.cols(); ++j) dx(i, j) = g(0, j) * inv;
      t.accumulate(x, dx);
    });
  }

  /// Row sums, r x 1.
  Val row_sums(Val x) {
    const Matrix& X = value(x);
    Matrix out(X.rows(), 1);
    for (std::size_t i = 0; i < X.rows(); ++i)
      for (std::size_t j = 0; j < X.cols(); ++j) out(i, 0) += X(i, j);
    return push(std::move(out), [x](Tape& t, const Matrix& g) {
      const Matrix& X2 = t.value(x);
      Matrix dx(X2.rows(), X2.cols());
      for (std::size_t i = 0; i < dx.rows(); ++i)
        for (std::size_t j = 0; j < dx.cols(); ++j) dx(i, j) = g(i, 0);
      t.accumulate(x, dx);
    });
  }

  Val add_identity(Val x) {
    const Matrix& X = value(x);
    if (X.rows() != X.cols()) shape_fail("add_identity", X);
    Matrix out = X;
    for (std::size_t i = 0; i < X.rows(); ++i) out(i, i) += 1.0;
    return push(std::move(out),
                [x](Tape& t, const Matrix& g) { t.accumulate(x, g); });
  }

  /// Elementwise x^(-1/2); requires strictly positive input.
  Val rsqrt(Val x) {
    const Matrix& X = value(x);
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (!(X.data()[i] > 0.0))
        throw std::invalid_argument("rsqrt: non-positive entry " +
                                    std::to_string(X.data()[i]));
      out.data()[i] = 1.0 / std::sqrt(X.data()[i]);
    }
    const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size());
    return push(std::move(out), [x, self](Tape& t, const Matrix& g) {
      const Matrix& y = t.nodes_[self].value;
      Matrix dx = g;
      for (std::size_t i = 0; i < g.size(); ++i)
        dx.data()[i] *= -0.5 * y.data()[i] * y.data()[i] * y.data()[i];
      t.accumulate(x, dx);
    });
  }

  /// Elementwise natural log; requires strictly positive input.
  Val elem_log(Val x) {
    const Matrix& X = value(x);
    Matrix out(X.rows(), X.cols());
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (!(X.data()[i] > 0.0))
        throw std::invalid_argument("elem_log: non-positive entry " +
                                    std::to_string(X.data()[i]));
      out.data()[i] = std::log(X.data()[i]);
    }
    return push(std::move(out), [x](Tape& t, const Matrix& g) {
      const Matrix& X2 = t.value(x);
      Matrix dx = g;
      for (std::size_t i = 0; i < g.size(); ++i) dx.data()[i] /= X2.data()[i];
      t.accumulate(x, dx);
    });
  }

  Val sum_all(Val x) {
    const Matrix& X = value(x);
    Matrix out(1, 1);
    for (std::size_t i = 0; i < X.size(); ++i) out(0, 0) += X.data()[i];
    return push(std::move(out), [x](Tape& t, const Matrix& g) {
      const Matrix& X2 = t.value(x);
      Matrix dx(X2.rows(), X2.cols());
      dx.fill(g(0, 0));
      t.accumulate(x, dx);
    });
  }

  /// Mean over rows of -log softmax(logits)[label]; the row softmax is
  /// computed with the usual max shift, so large margins saturate cleanly.
  Val softmax_cross_entropy(Val logits, const std::vector<int>& labels) {
    const Matrix& L = value(logits);
    if (labels.size() != L.rows())
      throw std::invalid_argument("softmax_cross_entropy: " + std::to_string(labels.size()) +
                                  " labels for " + shape_str(L) + " logits");
    for (int y : labels)
      if (y < 0 || static_cast<std::size_t>(y) >= L.cols())
        throw std::invalid_argument("softmax_cross_entropy: label " + std::to_string(y) +
                                    " out of range for " + std::to_string(L.cols()) +
                                    " classes");

    Matrix probs(L.rows(), L.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < L.rows(); ++i) {
      double mx = L(i, 0);
      for (std::size_t j = 1; j < L.cols(); ++j) mx = std::max(mx, L(i, j));
      double sum = 0.0;
      for (std::size_t j = 0; j < L.cols(); ++j) sum += (probs(i, j) = std::exp(L(i, j) - mx));
      for (std::size_t j = 0; j < L.cols(); ++j) probs(i, j) /= sum;
      loss -= L(i, static_cast<std::size_t>(labels[i])) - mx - std::log(sum);
    }
    Matrix out(1, 1);
    out(0, 0) = loss / static_cast<double>(L.rows());

    auto labels_copy = labels;
    return push(std::move(out), [logits, probs = std::move(probs),
                                 labels_copy = std::move(labels_copy)](Tape& t, const Matrix& g) {
      const double scale = g(0, 0) / static_cast<double>(probs.rows());
      Matrix dl = probs;
      for (std::size_t i = 0; i < probs.rows(); ++i)
        dl(i, static_cast<std::size_t>(labels_copy[i])) -= 1.0;
      scale_into(dl, scale);
      t.accumulate(logits, dl);
    });
  }

  // ---- reverse pass ----

  /// Seeds the (scalar) root with 1 and propagates to every contributing node.
  void backward(Val root) {
    const Matrix& r = value(root);
    if (r.rows() != 1 || r.cols() != 1)
      throw std::invalid_argument("backward: root must be 1x1, got " + shape_str(r));
    for (auto& n : nodes_) n.grad = Matrix();
    Matrix seed(1, 1);
    seed(0, 0) = 1.0;
    nodes_[root.idx].grad = std::move(seed);
    for (std::uint32_t i = root.idx + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0 || !n.back) continue;
      n.back(*this, n.grad);
    }
  }

 private:
  using BackFn = std::function<void(Tape&, const Matrix&)>;

  struct Node {
    Matrix value;
    Matrix grad;
    BackFn back;
  };

  Val push(Matrix value, BackFn back) {
    nodes_.push_back(Node{std::move(value), Matrix(), std::move(back)});
    return Val{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  void accumulate(Val v, const Matrix& g) {
    Matrix& slot = nodes_[v.idx].grad;
    if (slot.size() == 0)
      slot = g;
    else
      add_into(slot, g);
  }

  void accumulate(Val v, Matrix&& g) {
    Matrix& slot = nodes_[v.idx].grad;
    if (slot.size() == 0)
      slot = std::move(g);
    else
      add_into(slot, g);
  }

  // zeroed on first touch; accumulate-into kernels add to it directly
  Matrix& grad_slot(Val v) {
    Matrix& slot = nodes_[v.idx].grad;
    if (slot.size() == 0)
      slot = Matrix(nodes_[v.idx].value.rows(), nodes_[v.idx].value.cols());
    return slot;
  }

  std::vector<Node> nodes_;
};

}  // namespace avgraph
