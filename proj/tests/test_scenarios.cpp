#include <algorithm>

#include "doctest.h"
#include "eccmark/scenarios.hpp"

using namespace eccmark;

namespace {

constexpr SpatialKind kSpatial[] = {SpatialKind::csr, SpatialKind::thomas, SpatialKind::hardcore};
constexpr MarkKind kMarks[] = {MarkKind::random, MarkKind::positive, MarkKind::negative};

}  // namespace

TEST_CASE("scenario bindings") {
  CHECK(std::holds_alternative<GrfKriging>(default_mark_model(SpatialKind::csr, MarkKind::positive)));
  CHECK(std::holds_alternative<ClusterMeans>(default_mark_model(SpatialKind::thomas, MarkKind::positive)));
  CHECK(std::holds_alternative<Sinusoid>(default_mark_model(SpatialKind::hardcore, MarkKind::positive)));
  for (SpatialKind sp : kSpatial) {
    CHECK(std::holds_alternative<Checkerboard>(default_mark_model(sp, MarkKind::negative)));
    CHECK(std::holds_alternative<IidUniform>(default_mark_model(sp, MarkKind::random)));
  }
  const Window w(0, 10, 0, 10);
  CHECK(std::get<Hpp>(default_spatial_model(SpatialKind::csr, w, 80).process).lambda == doctest::Approx(0.8));
  CHECK(std::get<Thomas>(default_spatial_model(SpatialKind::thomas, w, 80).process).sigma == 0.7);
  CHECK(std::get<Hardcore>(default_spatial_model(SpatialKind::hardcore, w, 80).process).delta == 0.9);

  CHECK(spatial_kind_from_string("thomas") == SpatialKind::thomas);
  CHECK(mark_kind_from_string("negative") == MarkKind::negative);
  CHECK_THROWS_AS(spatial_kind_from_string("lgcp"), Error);
  CHECK_THROWS_AS(mark_kind_from_string("mixed"), Error);
}

TEST_CASE("every design cell generates 80 points with a full-range ECC") {
  for (SpatialKind sp : kSpatial) {
    for (MarkKind mk : kMarks) {
      ScenarioSpec spec;
      spec.spatial = sp;
      spec.marks = mk;
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto p = generate_pattern(spec, seed);
        REQUIRE(p.size() == 80);
        const auto q = generate_pattern(spec, seed);
        CHECK(p.marks() == q.marks());
        const auto d = pairwise_matrix(p, DistanceKind::mark_weighted);
        const auto c = euler_curve(d, default_grid(d, 100));
        CHECK(c.chi.front() == 80);
        CHECK(c.chi.back() == 1);
      }
    }
  }
}

TEST_CASE("run_scenario") {
  ScenarioSpec spec;
  spec.spatial = SpatialKind::thomas;
  spec.marks = MarkKind::negative;
  spec.n = 40;
  spec.s = 19;
  spec.seed = 4;
  const auto r = run_scenario(spec);
  CHECK(r.pattern.size() == 40);
  CHECK(r.csr_report.null_kind == NullKind::csr_intensity);
  CHECK(r.marked_report.null_kind == NullKind::random_labeling);
  CHECK(r.csr_report.s == 19);
  CHECK(r.marked_report.grid.size() == 100);
  CHECK(r.zscores.scores.size() == 40);
  CHECK(r.zscores.epsilon_crit == zscore_scale(r.marked_report));
  CHECK(r.marked.chi == r.marked_report.observed);
  CHECK(r.plain.chi == r.csr_report.observed);

  const auto again = run_scenario(spec);
  CHECK(again.marked_report.p_value == r.marked_report.p_value);
  CHECK(again.csr_report.upper == r.csr_report.upper);
  CHECK(again.zscores.scores == r.zscores.scores);
}

TEST_CASE("quantiles") {
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
  CHECK(quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(quantile({7}, 0.975) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("Monte Carlo bands") {
  ScenarioSpec spec;
  spec.spatial = SpatialKind::hardcore;
  spec.marks = MarkKind::positive;
  BandOptions opt;
  opt.grid_size = 30;
  opt.pilot = 5;
  const auto b = monte_carlo_bands(spec, 12, 7, opt);
  CHECK(b.replicates == 12);
  for (const Band* band : {&b.plain, &b.marked}) {
    REQUIRE(band->grid.size() == 30);
    for (std::size_t t = 0; t < 30; ++t) {
      CHECK(band->lo[t] <= band->median[t]);
      CHECK(band->median[t] <= band->hi[t]);
    }
    CHECK(band->median.front() == 80.0);
  }
  const auto again = monte_carlo_bands(spec, 12, 7, opt);
  CHECK(again.plain.median == b.plain.median);
  CHECK(again.marked.hi == b.marked.hi);

  BandOptions fixed = opt;
  fixed.plain_grid = {0.0, 0.5, 1.0};
  const auto f = monte_carlo_bands(spec, 4, 7, fixed);
  CHECK(f.plain.grid == fixed.plain_grid);
  CHECK(f.marked.grid.size() == 30);

  CHECK_THROWS_AS(monte_carlo_bands(spec, 1, 7, opt), Error);
}
