#include "eccmark/scenarios.hpp"

#include <algorithm>
#include <cmath>

#include "eccmark/parallel.hpp"

namespace eccmark {

std::string to_string(SpatialKind kind) {
  switch (kind) {
    case SpatialKind::csr: return "csr";
    case SpatialKind::thomas: return "thomas";
    case SpatialKind::hardcore: return "hardcore";
  }
  return "?";
}

std::string to_string(MarkKind kind) {
  switch (kind) {
    case MarkKind::random: return "random";
    case MarkKind::positive: return "positive";
    case MarkKind::negative: return "negative";
  }
  return "?";
}

SpatialKind spatial_kind_from_string(const std::string& name) {
  if (name == "csr") return SpatialKind::csr;
  if (name == "thomas") return SpatialKind::thomas;
  if (name == "hardcore") return SpatialKind::hardcore;
  throw Error("unknown spatial model '" + name + "' (expected csr, thomas or hardcore)");
}

MarkKind mark_kind_from_string(const std::string& name) {
  if (name == "random") return MarkKind::random;
  if (name == "positive") return MarkKind::positive;
  if (name == "negative") return MarkKind::negative;
  throw Error("unknown mark structure '" + name + "' (expected random, positive or negative)");
}

SpatialModel default_spatial_model(SpatialKind kind, const Window& window, std::size_t n) {
  const double rate = static_cast<double>(n) / window.area();
  switch (kind) {
    case SpatialKind::csr: return {Hpp{rate}, window};
    case SpatialKind::thomas: return {Thomas{}, window};
    case SpatialKind::hardcore: return {Hardcore{rate, 0.9}, window};
  }
  throw Error("unknown spatial model");
}

MarkModel default_mark_model(SpatialKind spatial, MarkKind marks) {
  switch (marks) {
    case MarkKind::random: return IidUniform{};
    case MarkKind::negative: return Checkerboard{};
    case MarkKind::positive:
      switch (spatial) {
        case SpatialKind::csr: return GrfKriging{};
        case SpatialKind::thomas: return ClusterMeans{};
        case SpatialKind::hardcore: return Sinusoid{};
      }
  }
  throw Error("unknown mark structure");
}

MarkedPointPattern generate_pattern(const ScenarioSpec& spec, std::uint64_t seed) {
  const SpatialModel spatial =
      spec.spatial_model ? *spec.spatial_model : default_spatial_model(spec.spatial, spec.window, spec.n);
  const MarkModel marks = spec.mark_model ? *spec.mark_model : default_mark_model(spec.spatial, spec.marks);
  SpatialSample loc = simulate_spatial(spatial, spec.n, seed);
  std::vector<double> m = simulate_marks(marks, loc, spatial.window, seed);
  return MarkedPointPattern(std::move(loc.points), std::move(m), spatial.window);
}

double zscore_scale(const EnvelopeReport& report) {
  if (report.epsilon_crit > 0.0) return report.epsilon_crit;
  for (double e : report.grid)
    if (e > 0.0) return e;
  throw Error("grid has no positive scale");
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  MarkedPointPattern pattern = generate_pattern(spec, spec.seed);
  GridPolicy policy;
  policy.size = spec.grid_size;

  const CurveEnsemble csr = csr_ensemble(pattern, spec.s, spec.seed, policy);
  const CurveEnsemble marked = random_labeling_ensemble(pattern, spec.s, spec.seed, policy);
  EnvelopeReport csr_report = rank_envelope(csr, spec.alpha);
  EnvelopeReport marked_report = rank_envelope(marked, spec.alpha);
  ZScoreMap z = local_z_scores(pattern, zscore_scale(marked_report), std::max<std::size_t>(spec.s, 2), spec.seed);
  return ScenarioResult{std::move(pattern), csr.observed,           marked.observed,
                        std::move(csr_report), std::move(marked_report), std::move(z)};
}

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t r) {
  return derive_seed(seed, StreamDomain::replicate, r);
}

Band summarise(const std::vector<double>& grid, const std::vector<EulerCurve>& curves) {
  Band band;
  band.grid = grid;
  const std::size_t k = grid.size();
  band.median.resize(k);
  band.lo.resize(k);
  band.hi.resize(k);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r].chi[t];
    band.median[t] = quantile(column, 0.5);
    band.lo[t] = quantile(column, 0.025);
    band.hi[t] = quantile(column, 0.975);
  }
  return band;
}

}  // namespace

std::pair<double, double> pilot_epsilon_max(const ScenarioSpec& spec, std::uint64_t seed, std::size_t pilot) {
  if (pilot == 0) throw Error("pilot needs at least one replicate");
  std::vector<double> plain(pilot), marked(pilot);
  parallel_for(pilot, [&](std::size_t r) {
    const MarkedPointPattern p = generate_pattern(spec, replicate_seed(seed, r));
    plain[r] = auto_epsilon_max(pairwise_matrix(p, DistanceKind::euclidean));
    marked[r] = auto_epsilon_max(pairwise_matrix(p, DistanceKind::mark_weighted));
  });
  auto top = [](const std::vector<double>& v) {
    const double q = quantile(v, 0.975);
    return q > 0.0 ? q : 1.0;
  };
  return {top(plain), top(marked)};
}

BandSummary monte_carlo_bands(const ScenarioSpec& spec, std::size_t replicates, std::uint64_t seed,
                              const BandOptions& options) {
  if (replicates < 2) throw Error("Monte Carlo bands need at least two replicates");
  std::vector<double> plain_grid = options.plain_grid;
  std::vector<double> marked_grid = options.marked_grid;
  if (plain_grid.empty() || marked_grid.empty()) {
    const auto [plain_top, marked_top] = pilot_epsilon_max(spec, seed, options.pilot);
    if (plain_grid.empty()) plain_grid = linear_grid(plain_top, options.grid_size);
    if (marked_grid.empty()) marked_grid = linear_grid(marked_top, options.grid_size);
  }

  std::vector<EulerCurve> plain(replicates), marked(replicates);
  parallel_for(replicates, [&](std::size_t r) {
    const MarkedPointPattern p = generate_pattern(spec, replicate_seed(seed, r));
    plain[r] = euler_curve(pairwise_matrix(p, DistanceKind::euclidean), plain_grid);
    marked[r] = euler_curve(pairwise_matrix(p, DistanceKind::mark_weighted), marked_grid);
  });

  BandSummary out;
  out.replicates = replicates;
  out.plain = summarise(plain_grid, plain);
  out.marked = summarise(marked_grid, marked);
  return out;
}

}  // namespace eccmark
