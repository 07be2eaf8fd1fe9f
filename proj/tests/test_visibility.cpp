#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "avgraph/rng.hpp"
#include "avgraph/series.hpp"
#include "avgraph/visibility.hpp"

using namespace avgraph;

namespace {

std::set<std::pair<int, int>> edge_set(const VisGraph& g) {
  std::set<std::pair<int, int>> s;
  for (const auto& e : g.edges()) s.insert({static_cast<int>(e.u), static_cast<int>(e.v)});
  return s;
}

// Independent oracle for HVG: literal evaluation of the horizontal rule.
std::set<std::pair<int, int>> hvg_brute(const std::vector<double>& t) {
  std::set<std::pair<int, int>> s;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      bool ok = true;
      for (std::size_t u = i + 1; u < j && ok; ++u)
        ok = t[u] < std::min(t[i], t[j]);
      if (ok) s.insert({static_cast<int>(i + 1), static_cast<int>(j + 1)});
    }
  }
  return s;
}

Series random_series(Rng& rng, std::size_t n, bool integer_valued = false) {
  std::vector<double> v(n);
  for (auto& x : v) x = integer_valued ? static_cast<double>(rng.below(6)) : rng.normal();
  return Series(std::move(v));
}

}  // namespace

TEST_CASE("vg_naive on simple shapes") {
  // collinear ramp: ties block, only the path survives
  CHECK(edge_set(vg_naive(Series({1, 2, 3, 4}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 4}});

  // strictly convex valley: every pair sees every other
  const VisGraph parabola = vg_naive(Series({4, 1, 0, 1, 4}));
  CHECK(parabola.edge_count() == 10);

  CHECK(edge_set(vg_naive(Series({3, 1, 2}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}, {1, 3}});

  CHECK(vg_naive(Series({5, 5})).edge_count() == 1);
}

TEST_CASE("vg_fast matches vg_naive on fixed cases") {
  for (const auto& values : std::vector<std::vector<double>>{
           {1, 2, 3, 4}, {3, 1, 2}, {4, 1, 0, 1, 4}, {1, 1, 1, 1},
           {2, 2, 1, 2, 2}, {0, 5, 0, 5, 0}, {1, 2}}) {
    const Series s(values);
    CHECK(vg_fast(s) == vg_naive(s));
  }
}

TEST_CASE("vg_fast matches vg_naive on random series") {
  Rng rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(63);
    const Series s = random_series(rng, n, trial % 3 == 0);
    const VisGraph fast = vg_fast(s);
    const VisGraph naive = vg_naive(s);
    REQUIRE(fast == naive);
  }
}

TEST_CASE("hvg fixed cases") {
  CHECK(edge_set(hvg(Series({3, 1, 2}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}, {1, 3}});
  CHECK(edge_set(hvg(Series({1, 2, 1}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}});
  // ties: an equal-height intermediate blocks
  CHECK(edge_set(hvg(Series({3, 1, 1, 3}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  CHECK(edge_set(hvg(Series({1, 1, 1}))) ==
        std::set<std::pair<int, int>>{{1, 2}, {2, 3}});
}

TEST_CASE("hvg equals brute force, including tied values") {
  Rng rng(77);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const Series s = random_series(rng, n, trial % 2 == 0);
    REQUIRE(edge_set(hvg(s)) == hvg_brute(s.values()));
  }
}

TEST_CASE("lpvg fixed cases") {
  // L = 0 collapses to plain visibility
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Series s = random_series(rng, 2 + rng.below(30));
    CHECK(lpvg(s, 0) == vg_naive(s));
  }

  // one allowed penetration: only (1,5) has two blockers
  const VisGraph g = lpvg(Series({1, 3, 1, 3, 1}), 1);
  CHECK(g.edge_count() == 9);
  CHECK_FALSE(g.has_edge(1, 5));

  CHECK_THROWS_AS(lpvg(Series({1, 2}), -1), std::invalid_argument);
}

TEST_CASE("mapping hierarchy and adjacency") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(50);
    const Series s = random_series(rng, n, trial % 4 == 0);
    const auto h = edge_set(hvg(s));
    const auto v = edge_set(vg_naive(s));
    const auto l1 = edge_set(lpvg(s, 1));
    const auto l3 = edge_set(lpvg(s, 3));

    for (const auto& e : h) REQUIRE(v.count(e) == 1);
    for (const auto& e : v) REQUIRE(l1.count(e) == 1);
    for (const auto& e : l1) REQUIRE(l3.count(e) == 1);

    for (std::size_t i = 1; i < n; ++i) {
      REQUIRE(h.count({static_cast<int>(i), static_cast<int>(i + 1)}) == 1);
      REQUIRE(v.count({static_cast<int>(i), static_cast<int>(i + 1)}) == 1);
    }
  }
}

TEST_CASE("affine invariance of edge sets") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const Series s = random_series(rng, n);
    const double a = 0.1 + 5.0 * rng.uniform();
    const double b = rng.normal(0.0, 10.0);
    std::vector<double> scaled(n);
    for (std::size_t k = 0; k < n; ++k) scaled[k] = a * s[k] + b;
    const Series s2(scaled);

    REQUIRE(edge_set(vg_naive(s)) == edge_set(vg_naive(s2)));
    REQUIRE(edge_set(hvg(s)) == edge_set(hvg(s2)));
    REQUIRE(edge_set(lpvg(s, 1)) == edge_set(lpvg(s2, 1)));
  }
}

TEST_CASE("VisGraph validation") {
  CHECK_THROWS_AS(VisGraph(2, {{1, 1, 1.0}}), std::invalid_argument);   // self loop
  CHECK_THROWS_AS(VisGraph(2, {{1, 3, 1.0}}), std::invalid_argument);   // out of range
  CHECK_THROWS_AS(VisGraph(2, {{1, 2, 0.0}}), std::invalid_argument);   // zero weight
  CHECK_THROWS_AS(VisGraph(3, {{1, 2, 1.0}, {1, 2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Series({1.0}), std::invalid_argument);                // too short
}
