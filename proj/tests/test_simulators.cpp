#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "eccmark/simulators.hpp"

using namespace eccmark;

namespace {

const Window kSquare{0.0, 10.0, 0.0, 10.0};

double min_distance(const std::vector<Point>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, euclidean_distance(pts[i], pts[j]));
  return best;
}

SpatialSample at(std::vector<Point> pts) { return SpatialSample{std::move(pts), {}}; }

}  // namespace

TEST_CASE("homogeneous Poisson") {
  SUBCASE("n_target fixes the count") {
    const auto s = simulate_spatial({Hpp{0.8}, kSquare}, 80, 1);
    CHECK(s.points.size() == 80);
    for (const auto& p : s.points) CHECK(kSquare.contains(p));
  }
  SUBCASE("unconditioned counts have mean lambda * area") {
    const int runs = 400;
    double total = 0.0;
    for (int seed = 0; seed < runs; ++seed) total += simulate_spatial({Hpp{0.8}, kSquare}, std::nullopt, seed).points.size();
    // Poisson(80): standard error of the mean is sqrt(80 / runs).
    CHECK(std::abs(total / runs - 80.0) < 4.0 * std::sqrt(80.0 / runs));
  }
}

TEST_CASE("hard-core separation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = simulate_spatial({Hardcore{0.8, 0.9}, kSquare}, 80, seed);
    REQUIRE(s.points.size() == 80);
    CHECK(min_distance(s.points) >= 0.9);
  }
  SUBCASE("infeasible targets name the budget") {
    try {
      simulate_spatial({Hardcore{0.8, 1.5, 20000}, kSquare}, 80, 3);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK((msg.find("budget") != std::string::npos || msg.find("pack") != std::string::npos));
    }
    CHECK_THROWS_AS(simulate_spatial({Hardcore{0.8, 5.0}, kSquare}, 80, 3), Error);
  }
}

TEST_CASE("Thomas process") {
  SUBCASE("exact count and labels") {
    const auto s = simulate_spatial({Thomas{}, kSquare}, 80, 4);
    CHECK(s.points.size() == 80);
    CHECK(s.cluster.size() == 80);
    for (const auto& p : s.points) CHECK(kSquare.contains(p));
  }
  SUBCASE("vanishing sigma collapses offspring onto parents") {
    Thomas t;
    t.sigma = 1e-9;
    const auto s = simulate_spatial({t, kSquare}, std::nullopt, 8);
    REQUIRE(!s.points.empty());
    std::map<int, Point> first;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      auto [it, fresh] = first.emplace(s.cluster[i], s.points[i]);
      if (!fresh) CHECK(euclidean_distance(it->second, s.points[i]) < 1e-7);
    }
  }
  SUBCASE("offspring spread matches sigma") {
    // Large window so edge clipping is negligible; pooled within-cluster
    // variance per axis estimates sigma^2.
    const Window big{0.0, 200.0, 0.0, 200.0};
    Thomas t;
    t.kappa = 0.002;
    double ss = 0.0;
    double dof = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto s = simulate_spatial({t, big}, std::nullopt, seed);
      std::map<int, std::vector<Point>> groups;
      for (std::size_t i = 0; i < s.points.size(); ++i) groups[s.cluster[i]].push_back(s.points[i]);
      for (const auto& [_, g] : groups) {
        if (g.size() < 2) continue;
        double mx = 0, my = 0;
        for (const auto& p : g) mx += p.x, my += p.y;
        mx /= g.size();
        my /= g.size();
        for (const auto& p : g) ss += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
        dof += 2.0 * (g.size() - 1);
      }
    }
    REQUIRE(dof > 1000);
    CHECK(std::sqrt(ss / dof) == doctest::Approx(0.7).epsilon(0.05));
  }
}

TEST_CASE("generators are deterministic given the seed") {
  for (const SpatialModel& m : {SpatialModel{Hpp{0.8}, kSquare}, SpatialModel{Thomas{}, kSquare},
                                SpatialModel{Hardcore{0.8, 0.9}, kSquare}}) {
    const auto a = simulate_spatial(m, 80, 77);
    const auto b = simulate_spatial(m, 80, 77);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].x == b.points[i].x);
      CHECK(a.points[i].y == b.points[i].y);
    }
    CHECK(a.cluster == b.cluster);
  }
  const auto loc = simulate_spatial({Thomas{}, kSquare}, 80, 5);
  for (const MarkModel& mm : {MarkModel{IidUniform{}}, MarkModel{GrfKriging{}}, MarkModel{ClusterMeans{}},
                              MarkModel{Sinusoid{}}, MarkModel{Checkerboard{}}}) {
    CHECK(simulate_marks(mm, loc, kSquare, 9) == simulate_marks(mm, loc, kSquare, 9));
  }
}

TEST_CASE("kernel intensity") {
  SUBCASE("single point kernel mass is one on a large window") {
    const std::vector<Point> one{{0.0, 0.0}};
    CHECK(kernel_mass(one, 0.7, Window(-50, 50, -50, 50)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(kernel_mass(one, 0.7, Window(0, 50, 0, 50)) == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("two separated points, small bandwidth") {
    const std::vector<Point> two{{2.0, 2.0}, {8.0, 8.0}};
    const double h = 0.1;
    const double phi0 = 1.0 / (2.0 * std::numbers::pi * h * h);
    CHECK(kernel_sum(two, h, two[0]) == doctest::Approx(phi0).epsilon(1e-12));
    CHECK(cvl_discrepancy(two, h, kSquare) == doctest::Approx(std::abs(2.0 / phi0 - 100.0)).epsilon(1e-12));
  }
  SUBCASE("raster integrates to the point count") {
    const auto s = simulate_spatial({Thomas{}, kSquare}, 80, 2);
    const auto grid = kernel_intensity(s.points, kSquare, std::nullopt);
    CHECK(grid.integral() == doctest::Approx(80.0).epsilon(0.01));
    CHECK(grid.raw_mass() <= 80.0 + 1e-9);
    for (double v : grid.values()) CHECK(v >= 0.0);
  }
  SUBCASE("candidates") {
    const auto c = cvl_candidates(kSquare);
    REQUIRE(c.size() == 32);
    CHECK(c.front() == doctest::Approx(0.005 * kSquare.diagonal()));
    CHECK(c.back() == doctest::Approx(0.5 * kSquare.diagonal()));
    CHECK(std::is_sorted(c.begin(), c.end()));
  }
  SUBCASE("CvL bandwidth is interior for uniform patterns") {
    const auto c = cvl_candidates(kSquare);
    int interior = 0;
    const int runs = 50;
    for (int seed = 0; seed < runs; ++seed) {
      const auto s = simulate_spatial({Hpp{0.8}, kSquare}, 80, 1000 + seed);
      const double h = cvl_bandwidth(s.points, kSquare);
      interior += (h != c.front() && h != c.back());
    }
    CHECK(interior >= 0.9 * runs);
  }
  CHECK_THROWS_AS(kernel_intensity(std::vector<Point>{}, kSquare, std::nullopt), Error);
}

TEST_CASE("inhomogeneous Poisson thinning") {
  const auto s = simulate_spatial({Thomas{}, kSquare}, 80, 12);
  const auto grid = kernel_intensity(s.points, kSquare, std::nullopt);
  const SpatialModel ipp{Ipp{grid}, kSquare};
  const double mass = grid.integral();
  int within = 0;
  const int runs = 200;
  for (int seed = 0; seed < runs; ++seed) {
    const auto sim = simulate_spatial(ipp, std::nullopt, seed);
    for (const auto& p : sim.points) REQUIRE(kSquare.contains(p));
    within += std::abs(static_cast<double>(sim.points.size()) - mass) <= 3.0 * std::sqrt(mass);
  }
  CHECK(within >= 0.99 * runs);
}

TEST_CASE("mark model examples") {
  SUBCASE("checkerboard parity") {
    const auto m = simulate_marks(Checkerboard{}, at({{1, 1}, {3, 1}, {3, 3}, {6, 1}}), kSquare, 1);
    CHECK(std::abs(m[0] - 0.0) < 0.05);
    CHECK(std::abs(m[1] - 8.0) < 0.05);
    CHECK(std::abs(m[2] - 0.0) < 0.05);
    CHECK(std::abs(m[3] - 0.0) < 0.05);
  }
  SUBCASE("sinusoid at the origin") {
    const auto m = simulate_marks(Sinusoid{}, at({{0, 0}}), kSquare, 1);
    CHECK(std::abs(m[0] - 4.0) < 0.25);
    Sinusoid quiet;
    quiet.noise_sd = 0.0;
    const double x = 0.1, y = 0.2;
    const double expect = 4.0 * std::sin(12.0 * std::numbers::pi * x / 4.5) * std::cos(2.0 * std::numbers::pi * y / 2.5) + 4.0;
    CHECK(simulate_marks(quiet, at({{x, y}}), kSquare, 1)[0] == doctest::Approx(expect));
  }
  SUBCASE("uniform marks stay in range") {
    const auto loc = simulate_spatial({Hpp{0.8}, kSquare}, 80, 3);
    for (double v : simulate_marks(IidUniform{}, loc, kSquare, 3)) CHECK((v >= 0.0 && v <= 8.0));
  }
  SUBCASE("cluster means alternate") {
    const auto loc = simulate_spatial({Thomas{}, kSquare}, 80, 6);
    const auto m = simulate_marks(ClusterMeans{}, loc, kSquare, 6);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double level = loc.cluster[i] % 2 == 0 ? 0.0 : 8.0;
      CHECK(std::abs(m[i] - level) < 0.06);
    }
    CHECK_THROWS_AS(simulate_marks(ClusterMeans{}, at({{1, 1}}), kSquare, 1), Error);
  }
  SUBCASE("kriged field is rescaled onto [lo, hi]") {
    const auto loc = simulate_spatial({Hpp{0.8}, kSquare}, 80, 3);
    const auto m = simulate_marks(GrfKriging{}, loc, kSquare, 3);
    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    CHECK(*lo == doctest::Approx(0.0));
    CHECK(*hi == doctest::Approx(8.0));
  }
  SUBCASE("invalid models") {
    CHECK_THROWS_AS(validate(MarkModel{IidUniform{8.0, 0.0}}), Error);
    CHECK_THROWS_AS(validate(MarkModel{Checkerboard{0.0}}), Error);
    CHECK_THROWS_AS(simulate_marks(IidUniform{}, at({{11, 1}}), kSquare, 1), Error);
  }
}

TEST_CASE("Gaussian field kriging") {
  const GrfKriging model;
  Rng rng = make_rng(5, StreamDomain::marks, 0);
  const auto field = sample_gaussian_field(model, kSquare, rng);
  REQUIRE(field.nodes.size() == 400);
  CHECK(field.nodes.front().x == 0.0);
  CHECK(field.nodes.back().x == 10.0);
  CHECK(field.nodes.back().y == 10.0);

  SUBCASE("interpolation is exact at nodes up to the nugget") {
    const auto at_nodes = krige(field, model.rho, field.nodes);
    double wmax = 0.0;
    for (double w : field.weights) wmax = std::max(wmax, std::abs(w));
    for (std::size_t j = 0; j < field.nodes.size(); ++j) {
      CHECK(std::abs(at_nodes[j] - field.z[j]) <= model.nugget * wmax * (1.0 + 1e-6) + 1e-9);
    }
  }
  SUBCASE("zero field gives equal marks at the midpoint") {
    GaussianFieldSample zero = field;
    std::fill(zero.z.begin(), zero.z.end(), 0.0);
    std::fill(zero.weights.begin(), zero.weights.end(), 0.0);
    const std::vector<Point> pts{{1, 1}, {5, 2}, {9, 9}};
    const auto values = krige(zero, model.rho, pts);
    for (double v : rescale(values, 0.0, 8.0)) CHECK(v == 4.0);
  }
}
