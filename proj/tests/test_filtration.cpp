#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "eccmark/filtration.hpp"
#include "homology_oracle.hpp"

using namespace eccmark;

namespace {

DistanceMatrix from_points(const std::vector<Point>& pts) {
  std::vector<double> marks(pts.size(), 0.0);
  return pairwise_matrix(pts, marks, DistanceKind::euclidean);
}

DistanceMatrix unit_square() { return from_points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

DistanceMatrix equilateral() {
  return from_points({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
}

}  // namespace

TEST_CASE("build_filtration examples") {
  SUBCASE("two points") {
    auto f = build_filtration(from_points({{0, 0}, {3, 0}}), 5.0);
    CHECK(f.count(0) == 2);
    CHECK(f.count(1) == 1);
    CHECK(f.count(2) == 0);
    CHECK(f.simplices().back().value == 3.0);
  }
  SUBCASE("mutually unit-distance triple") {
    std::vector<double> d{0, 1, 1, 1, 0, 1, 1, 1, 0};
    auto f = build_filtration(DistanceMatrix(3, d, DistanceKind::euclidean), 2.0);
    CHECK(f.count(0) == 3);
    CHECK(f.count(1) == 3);
    REQUIRE(f.count(2) == 1);
    CHECK(f.simplices().back().dim == 2);
    CHECK(f.simplices().back().value == 1.0);
  }
  SUBCASE("unit square below the diagonal") {
    auto f = build_filtration(unit_square(), 1.2);
    CHECK(f.count(0) == 4);
    CHECK(f.count(1) == 4);
    CHECK(f.count(2) == 0);
    for (const auto& s : f.simplices())
      if (s.dim == 1) CHECK(s.value == 1.0);
  }
  SUBCASE("invalid epsilon_max") {
    CHECK_THROWS_AS(build_filtration(unit_square(), kInfinity), Error);
    CHECK_THROWS_AS(build_filtration(unit_square(), std::nan("")), Error);
    CHECK_THROWS_AS(build_filtration(unit_square(), 0.0), Error);
  }
}

TEST_CASE("filtration order is valid and VR-consistent") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0), m(0.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Point> pts;
    std::vector<double> marks;
    for (int i = 0; i < 15; ++i) {
      pts.push_back({u(rng), u(rng)});
      marks.push_back(m(rng));
    }
    const auto dist = pairwise_matrix(pts, marks, DistanceKind::mark_weighted);
    const double eps = 30.0;
    const auto f = build_filtration(dist, eps);
    std::set<std::array<std::uint32_t, 3>> seen;
    const auto& s = f.simplices();
    CHECK(std::is_sorted(s.begin(), s.end(), filtration_less));
    for (const auto& x : s) {
      CHECK(x.value <= eps);
      if (x.dim == 0) CHECK(x.value == 0.0);
      if (x.dim == 1) {
        CHECK(x.value == dist(x.vertices[0], x.vertices[1]));
        CHECK(seen.count({x.vertices[0], Simplex::kNoVertex, Simplex::kNoVertex}) == 1);
        CHECK(seen.count({x.vertices[1], Simplex::kNoVertex, Simplex::kNoVertex}) == 1);
      }
      if (x.dim == 2) {
        const auto [a, b, c] = x.vertices;
        CHECK(x.value == std::max({dist(a, b), dist(a, c), dist(b, c)}));
        CHECK(seen.count({a, b, Simplex::kNoVertex}) == 1);
        CHECK(seen.count({a, c, Simplex::kNoVertex}) == 1);
        CHECK(seen.count({b, c, Simplex::kNoVertex}) == 1);
      }
      seen.insert(x.vertices);
    }
    // Complete: every pair and triple under the threshold is present.
    std::size_t edges = 0, tris = 0;
    for (std::size_t i = 0; i < 15; ++i)
      for (std::size_t j = i + 1; j < 15; ++j) {
        if (dist(i, j) <= eps) ++edges;
        for (std::size_t k = j + 1; k < 15; ++k)
          if (std::max({dist(i, j), dist(i, k), dist(j, k)}) <= eps) ++tris;
      }
    CHECK(f.count(1) == edges);
    CHECK(f.count(2) == tris);
  }
}

TEST_CASE("persistence examples") {
  SUBCASE("isolated points") {
    auto diag = compute_persistence(build_filtration(from_points({{0, 0}, {5, 0}, {0, 5}}), 1.0));
    REQUIRE(diag.dim0.size() == 3);
    for (const auto& p : diag.dim0) CHECK(p == PersistencePair{0.0, kInfinity});
    CHECK(diag.dim1.empty());
  }
  SUBCASE("unit square loop") {
    // Oracle ranks first: no loop at 0.9, one loop at 1.1, filled at 1.5.
    const auto square = unit_square();
    const auto& d = square.entries();
    CHECK(oracle::betti_at(d, 4, 0.9).beta0 == 4);
    CHECK(oracle::betti_at(d, 4, 0.9).beta1 == 0);
    CHECK(oracle::betti_at(d, 4, 1.1).beta0 == 1);
    CHECK(oracle::betti_at(d, 4, 1.1).beta1 == 1);
    CHECK(oracle::betti_at(d, 4, 1.5).beta1 == 0);

    auto diag = compute_persistence(build_filtration(unit_square(), 2.0));
    REQUIRE(diag.dim1.size() == 1);
    CHECK(diag.dim1[0].birth == 1.0);
    CHECK(diag.dim1[0].death == std::sqrt(2.0));
    CHECK(diag.dim0.size() == 4);
    CHECK(std::count_if(diag.dim0.begin(), diag.dim0.end(), [](auto p) { return p.essential(); }) == 1);
  }
  SUBCASE("equilateral triple has no loop") {
    std::vector<double> d{0, 1, 1, 1, 0, 1, 1, 1, 0};
    auto diag = compute_persistence(build_filtration(DistanceMatrix(3, d, DistanceKind::euclidean), 2.0));
    CHECK(diag.dim1.empty());
    std::vector<double> deaths;
    for (auto p : diag.dim0)
      if (!p.essential()) deaths.push_back(p.death);
    CHECK(deaths == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("loop that survives truncation is essential") {
    auto diag = compute_persistence(build_filtration(unit_square(), 1.2));
    REQUIRE(diag.dim1.size() == 1);
    CHECK(diag.dim1[0].birth == 1.0);
    CHECK(diag.dim1[0].essential());
  }
}

TEST_CASE("betti curves") {
  SUBCASE("unit square") {
    const std::vector<double> grid{0.0, 0.9, 1.2, 1.5};
    auto c = betti_curves(compute_persistence(build_filtration(unit_square(), 1.5)), grid);
    CHECK(c.beta0 == std::vector<int>{4, 4, 1, 1});
    CHECK(c.beta1 == std::vector<int>{0, 0, 1, 0});
    CHECK(c.chi == std::vector<int>{4, 4, 0, 1});
  }
  SUBCASE("endpoints on a random pattern") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Point> pts;
    for (int i = 0; i < 80; ++i) pts.push_back({u(rng), u(rng)});
    const auto dist = from_points(pts);
    const auto grid = default_grid(dist, 100);
    const auto c = euler_curve(dist, grid);
    CHECK(c.chi.front() == 80);
    CHECK(c.beta0.back() == 1);
    CHECK(c.chi.back() == 1);
    CHECK(std::is_sorted(c.beta0.rbegin(), c.beta0.rend()));
  }
  SUBCASE("non-increasing grid rejected") {
    PersistenceDiagram d;
    CHECK_THROWS_AS(betti_curves(d, std::vector<double>{0.0, 1.0, 1.0}), Error);
  }
}

TEST_CASE("default grid") {
  CHECK(default_grid(from_points({{0, 0}, {10, 0}}), 3) == std::vector<double>{0.0, 6.0, 12.0});
  CHECK(default_grid(from_points({{1, 1}}), 2) == std::vector<double>{0.0, 1.0});
  CHECK(auto_epsilon_max(from_points({{0, 0}, {1, 0}, {2, 0}})) == doctest::Approx(1.2));
  CHECK(mst_max_edge(from_points({{0, 0}, {1, 0}, {2, 0}})) == 1.0);
  // The square's loop only closes at the diagonal.
  CHECK(auto_epsilon_max(unit_square()) == doctest::Approx(1.2 * std::sqrt(2.0)));
  CHECK_THROWS_AS(linear_grid(1.0, 1), Error);
}

TEST_CASE("persistence agrees with brute-force ranks") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(3, 8);
  std::uniform_real_distribution<double> u(0.0, 10.0), m(0.0, 4.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = size(rng);
    std::vector<Point> pts;
    std::vector<double> marks;
    for (int i = 0; i < n; ++i) {
      pts.push_back({u(rng), u(rng)});
      marks.push_back(m(rng));
    }
    const auto dist = pairwise_matrix(pts, marks, DistanceKind::mark_weighted);
    const auto grid = default_grid(dist, 10);
    const auto c = euler_curve(dist, grid);
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const auto b = oracle::betti_at(dist.entries(), dist.size(), grid[t]);
      CHECK(c.beta0[t] == b.beta0);
      CHECK(c.beta1[t] == b.beta1);
    }
  }
}

TEST_CASE("constant marks reproduce the euclidean filtration") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Point> pts;
  for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
  const std::vector<double> marks(30, 2.5);
  const auto de = pairwise_matrix(pts, marks, DistanceKind::euclidean);
  const auto dm = pairwise_matrix(pts, marks, DistanceKind::mark_weighted);
  CHECK(de.entries() == dm.entries());
  const auto grid = default_grid(de, 50);
  CHECK(euler_curve(de, grid) == euler_curve(dm, grid));
}

TEST_CASE("duplicate locations merge at zero") {
  std::vector<double> d{0, 0, 2, 0, 0, 2, 2, 2, 0};
  const DistanceMatrix dist(3, d, DistanceKind::euclidean);
  const auto diag = compute_persistence(build_filtration(dist, 3.0));
  CHECK(diag.dim0.size() == 3);
  const auto c = betti_curves(diag, std::vector<double>{0.0, 1.0, 2.0});
  CHECK(c.beta0 == std::vector<int>{2, 2, 1});
}
