#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "avgraph/series.hpp"

namespace avgraph {

/// Undirected weighted graph on time-indexed nodes. Nodes are numbered
/// 1..node_count; edges are stored once with u < v, sorted and duplicate-free.
class VisGraph {
 public:
  struct Edge {
    std::uint32_t u, v;
    double weight;

    friend bool operator==(const Edge& a, const Edge& b) {
      return a.u == b.u && a.v == b.v && a.weight == b.weight;
    }
  };

  VisGraph(std::size_t node_count, std::vector<Edge> edges)
      : node_count_(node_count), edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Edge& e = edges_[k];
      if (e.u < 1 || e.v <= e.u || e.v > node_count_)
        throw std::invalid_argument("VisGraph: bad edge (" + std::to_string(e.u) + "," +
                                    std::to_string(e.v) + ")");
      if (!(e.weight > 0.0)) throw std::invalid_argument("VisGraph: non-positive weight");
      if (k > 0 && edges_[k - 1].u == e.u && edges_[k - 1].v == e.v)
        throw std::invalid_argument("VisGraph: duplicate edge");
    }
  }

  std::size_t node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_edge(std::uint32_t u, std::uint32_t v) const {
    if (u > v) std::swap(u, v);
    const Edge probe{u, v, 1.0};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), probe,
                               [](const Edge& a, const Edge& b) {
                                 return a.u != b.u ? a.u < b.u : a.v < b.v;
                               });
    return it != edges_.end() && it->u == u && it->v == v;
  }

  friend bool operator==(const VisGraph& a, const VisGraph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
};

namespace detail {

// Chord test: node u blocks pair (i, j) unless T_u lies strictly below the
// straight line through (i, T_i) and (j, T_j). Indices are 0-based here.
inline bool below_chord(const std::vector<double>& t, std::size_t i, std::size_t u,
                        std::size_t j) {
  const double chord = (t[j] - t[i]) * (static_cast<double>(u) - static_cast<double>(j)) /
                           (static_cast<double>(j) - static_cast<double>(i)) +
                       t[j];
  return t[u] < chord;
}

}  // namespace detail

/// Natural visibility graph, direct evaluation of the chord rule for every
/// pair. Quadratic-ish; serves as the oracle for vg_fast.
inline VisGraph vg_naive(const Series& series) {
  const auto& t = series.values();
  const std::size_t n = t.size();
  std::vector<VisGraph::Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool visible = true;
      for (std::size_t u = i + 1; u < j; ++u) {
        if (!detail::below_chord(t, i, u, j)) {
          visible = false;
          break;
        }
      }
      if (visible)
        edges.push_back({static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1), 1.0});
    }
  }
  return VisGraph(n, std::move(edges));
}

// Divide and conquer on the maximum element. No chord can pass over the
// segment maximum, so every edge either touches the maximum (found by the
// two slope scans) or lies entirely within one half (found recursively).
// Expected O(n log n) on rough series; an explicit worklist avoids deep
// recursion on monotone inputs.
inline VisGraph vg_fast(const Series& series) {
  const auto& t = series.values();
  const std::size_t n = t.size();
  std::vector<VisGraph::Edge> edges;
  edges.reserve(2 * n);

  std::vector<std::pair<std::size_t, std::size_t>> work;  // inclusive [lo, hi]
  work.emplace_back(0, n - 1);
  while (!work.empty()) {
    const auto [lo, hi] = work.back();
    work.pop_back();
    if (hi <= lo) continue;

    std::size_t k = lo;
    for (std::size_t x = lo + 1; x <= hi; ++x)
      if (t[x] > t[k]) k = x;

    // leftward scan: j sees k iff its slope toward k undercuts every slope
    // seen so far (strict rule: ties block)
    double run_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = k; j-- > lo;) {
      const double s = (t[j] - t[k]) / (static_cast<double>(j) - static_cast<double>(k));
      if (s < run_min)
        edges.push_back({static_cast<std::uint32_t>(j + 1), static_cast<std::uint32_t>(k + 1), 1.0});
      run_min = std::min(run_min, s);
    }
    // rightward scan, mirrored
    double run_max = -std::numeric_limits<double>::infinity();
    for (std::size_t j = k + 1; j <= hi; ++j) {
      const double s = (t[j] - t[k]) / (static_cast<double>(j) - static_cast<double>(k));
      if (s > run_max)
        edges.push_back({static_cast<std::uint32_t>(k + 1), static_cast<std::uint32_t>(j + 1), 1.0});
      run_max = std::max(run_max, s);
    }

    if (k > lo) work.emplace_back(lo, k - 1);
    if (k < hi) work.emplace_back(k + 1, hi);
  }
  return VisGraph(n, std::move(edges));
}

// Horizontal visibility via a monotone stack, O(n). Strict rule: an
// intermediate equal to either endpoint blocks, so an element equal to the
// incoming value is popped right after its edge is recorded -- it shadows
// everything farther left at the same height.
inline VisGraph hvg(const Series& series) {
  const auto& t = series.values();
  const std::size_t n = t.size();
  std::vector<VisGraph::Edge> edges;
  edges.reserve(2 * n);
  std::vector<std::size_t> stack;
  stack.reserve(n);

  for (std::size_t j = 0; j < n; ++j) {
    while (!stack.empty() && t[stack.back()] < t[j]) {
      edges.push_back({static_cast<std::uint32_t>(stack.back() + 1),
                       static_cast<std::uint32_t>(j + 1), 1.0});
      stack.pop_back();
    }
    if (!stack.empty()) {
      edges.push_back({static_cast<std::uint32_t>(stack.back() + 1),
                       static_cast<std::uint32_t>(j + 1), 1.0});
      if (t[stack.back()] == t[j]) stack.pop_back();
    }
    stack.push_back(j);
  }
  return VisGraph(n, std::move(edges));
}

/// Limited penetrable visibility: a pair connects if at most
/// `penetrable_limit` intermediates violate the chord rule.
inline VisGraph lpvg(const Series& series, int penetrable_limit) {
  if (penetrable_limit < 0) throw std::invalid_argument("lpvg: negative penetrable limit");
  const auto& t = series.values();
  const std::size_t n = t.size();
  std::vector<VisGraph::Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int violations = 0;
      for (std::size_t u = i + 1; u < j; ++u) {
        if (!detail::below_chord(t, i, u, j) && ++violations > penetrable_limit) break;
      }
      if (violations <= penetrable_limit)
        edges.push_back({static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1), 1.0});
    }
  }
  return VisGraph(n, std::move(edges));
}

}  // namespace avgraph
