#include "eccmark/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eccmark/parallel.hpp"
#include "eccmark/random.hpp"
#include "eccmark/simulators.hpp"

namespace eccmark {

std::string to_string(NullKind kind) {
  return kind == NullKind::random_labeling ? "random_labeling" : "csr_intensity";
}

NullKind null_kind_from_string(const std::string& name) {
  if (name == "random_labeling") return NullKind::random_labeling;
  if (name == "csr_intensity" || name == "csr") return NullKind::csr_intensity;
  throw Error("unknown null model '" + name + "'");
}

std::vector<std::size_t> mark_permutation(std::size_t n, std::uint64_t seed, std::size_t j) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = make_rng(seed, StreamDomain::permutation, j);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<double> permuted_marks(std::span<const double> marks, std::uint64_t seed, std::size_t j) {
  const auto perm = mark_permutation(marks.size(), seed, j);
  std::vector<double> out(marks.size());
  for (std::size_t i = 0; i < marks.size(); ++i) out[i] = marks[perm[i]];
  return out;
}

namespace {

std::vector<double> resolve_grid(const GridPolicy& policy, const std::function<double()>& automatic) {
  if (!policy.grid.empty()) {
    for (std::size_t t = 1; t < policy.grid.size(); ++t) {
      if (!(policy.grid[t - 1] < policy.grid[t])) throw Error("explicit grid must be strictly increasing");
    }
    if (policy.grid.front() < 0.0) throw Error("explicit grid must be non-negative");
    return policy.grid;
  }
  if (policy.epsilon_max) return linear_grid(*policy.epsilon_max, policy.size);
  const double top = automatic();
  return linear_grid(top > 0.0 ? top : 1.0, policy.size);
}

}  // namespace

double random_labeling_epsilon_max(const MarkedPointPattern& pattern, std::uint64_t seed, std::size_t pilot) {
  const auto& pts = pattern.points();
  const auto& marks = pattern.marks();
  const double observed = auto_epsilon_max(pairwise_matrix(pattern, DistanceKind::mark_weighted));
  if (pilot == 0) return observed;

  std::vector<double> scales(pilot, 0.0);
  parallel_for(pilot, [&](std::size_t k) {
    const auto m = permuted_marks(marks, seed, k + 1);
    scales[k] = auto_epsilon_max(pairwise_matrix(pts, m, DistanceKind::mark_weighted));
  });
  const double pilot_max = *std::max_element(scales.begin(), scales.end());
  const auto [lo, hi] = std::minmax_element(marks.begin(), marks.end());
  const double cap =
      1.2 * mst_max_edge(pairwise_matrix(pattern, DistanceKind::euclidean)) * std::exp(*hi - *lo);
  return std::max(observed, std::min(pilot_max, cap));
}

CurveEnsemble random_labeling_ensemble(const MarkedPointPattern& pattern, std::size_t s, std::uint64_t seed,
                                       const GridPolicy& policy) {
  if (pattern.size() < 2) throw Error("random labeling needs at least two points");
  if (s < 1) throw Error("ensemble needs at least one simulation");

  CurveEnsemble ens;
  ens.null_kind = NullKind::random_labeling;
  ens.seed = seed;
  ens.grid = resolve_grid(policy, [&] { return random_labeling_epsilon_max(pattern, seed, policy.pilot); });
  ens.observed = euler_curve(pairwise_matrix(pattern, DistanceKind::mark_weighted), ens.grid);
  ens.simulated.resize(s);
  parallel_for(s, [&](std::size_t k) {
    const auto m = permuted_marks(pattern.marks(), seed, k + 1);
    ens.simulated[k] = euler_curve(pairwise_matrix(pattern.points(), m, DistanceKind::mark_weighted), ens.grid);
  });
  return ens;
}

EulerCurve plain_curve(std::span<const Point> points, std::span<const double> grid) {
  if (points.empty()) {
    EulerCurve c;
    c.grid.assign(grid.begin(), grid.end());
    c.beta0.assign(grid.size(), 0);
    c.beta1.assign(grid.size(), 0);
    c.chi.assign(grid.size(), 0);
    return c;
  }
  const std::vector<double> no_marks(points.size(), 0.0);
  return euler_curve(pairwise_matrix(points, no_marks, DistanceKind::euclidean), grid);
}

CurveEnsemble csr_ensemble(const MarkedPointPattern& pattern, std::size_t s, std::uint64_t seed,
                           const GridPolicy& policy) {
  if (s < 1) throw Error("ensemble needs at least one simulation");
  const auto& pts = pattern.points();

  CurveEnsemble ens;
  ens.null_kind = NullKind::csr_intensity;
  ens.seed = seed;
  ens.grid = resolve_grid(policy, [&] { return auto_epsilon_max(pairwise_matrix(pattern, DistanceKind::euclidean)); });
  ens.observed = plain_curve(pts, ens.grid);

  const SpatialModel model{Ipp{kernel_intensity(pts, pattern.window(), std::nullopt)}, pattern.window()};
  ens.simulated.resize(s);
  parallel_for(s, [&](std::size_t k) {
    Rng rng = make_rng(seed, StreamDomain::csr_null, k + 1);
    const SpatialSample sim = simulate_spatial(model, std::nullopt, rng);
    ens.simulated[k] = plain_curve(sim.points, ens.grid);
  });
  return ens;
}

namespace {

void check_grids(const CurveEnsemble& ens) {
  if (ens.simulated.empty()) throw Error("ensemble has no simulated curves");
  auto same = [&](const EulerCurve& c) { return c.grid == ens.grid && c.chi.size() == ens.grid.size(); };
  if (!same(ens.observed)) throw Error("observed curve is not on the ensemble grid");
  for (const auto& c : ens.simulated) {
    if (!same(c)) throw Error("simulated curves do not share the ensemble grid");
  }
}

const EulerCurve& curve_at(const CurveEnsemble& ens, std::size_t i) {
  return i == 0 ? ens.observed : ens.simulated[i - 1];
}

}  // namespace

RankTable pointwise_ranks(const CurveEnsemble& ens) {
  check_grids(ens);
  const std::size_t curves = ens.simulated.size() + 1;
  const std::size_t k = ens.grid.size();
  RankTable table;
  table.two_sided.assign(curves, std::vector<double>(k));
  table.below.assign(curves, std::vector<double>(k));

  std::vector<std::size_t> order(curves);
  for (std::size_t t = 0; t < k; ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return curve_at(ens, a).chi[t] < curve_at(ens, b).chi[t];
    });
    for (std::size_t start = 0; start < curves;) {
      std::size_t stop = start;
      const int v = curve_at(ens, order[start]).chi[t];
      while (stop < curves && curve_at(ens, order[stop]).chi[t] == v) ++stop;
      const double tied = static_cast<double>(stop - start);
      const double below = static_cast<double>(start) + (tied + 1.0) / 2.0;
      const double above = static_cast<double>(curves - stop) + (tied + 1.0) / 2.0;
      for (std::size_t r = start; r < stop; ++r) {
        table.below[order[r]][t] = below;
        table.two_sided[order[r]][t] = std::min(below, above);
      }
      start = stop;
    }
  }
  return table;
}

std::vector<std::size_t> EnvelopeReport::exits_below() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < observed.size(); ++t)
    if (observed[t] < lower[t]) out.push_back(t);
  return out;
}

std::vector<std::size_t> EnvelopeReport::exits_above() const {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < observed.size(); ++t)
    if (observed[t] > upper[t]) out.push_back(t);
  return out;
}

namespace {

CriticalScale critical_from(const CurveEnsemble& ens, const RankTable& table) {
  const double median = (static_cast<double>(ens.simulated.size()) + 2.0) / 2.0;
  CriticalScale best;
  best.deviation = -1.0;
  for (std::size_t t = 0; t < ens.grid.size(); ++t) {
    const double dev = std::abs(table.below[0][t] - median);
    if (dev > best.deviation) {
      best.deviation = dev;
      best.index = t;
      best.epsilon = ens.grid[t];
    }
  }
  return best;
}

}  // namespace

CriticalScale critical_scale(const CurveEnsemble& ens) { return critical_from(ens, pointwise_ranks(ens)); }

EnvelopeReport rank_envelope(const CurveEnsemble& ens, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie strictly between 0 and 1");
  const RankTable table = pointwise_ranks(ens);
  const std::size_t curves = ens.simulated.size() + 1;
  const std::size_t k = ens.grid.size();

  std::vector<std::vector<double>> erl = table.two_sided;
  for (auto& v : erl) std::sort(v.begin(), v.end());

  // at_least_as_extreme[i] = #{j : erl_j <= erl_i}, counting i itself.
  std::vector<std::size_t> order(curves);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return erl[a] < erl[b]; });
  std::vector<std::size_t> at_least_as_extreme(curves);
  for (std::size_t start = 0; start < curves;) {
    std::size_t stop = start;
    while (stop < curves && erl[order[stop]] == erl[order[start]]) ++stop;
    for (std::size_t r = start; r < stop; ++r) at_least_as_extreme[order[r]] = stop;
    start = stop;
  }

  EnvelopeReport rep;
  rep.null_kind = ens.null_kind;
  rep.s = ens.simulated.size();
  rep.seed = ens.seed;
  rep.alpha = alpha;
  rep.grid = ens.grid;
  rep.observed = ens.observed.chi;
  rep.generator = std::string(kGeneratorName);
  rep.p_value = static_cast<double>(at_least_as_extreme[0]) / static_cast<double>(curves);
  rep.extreme_rank_obs = erl[0].front();
  rep.rank_profile = table.below[0];

  const double cutoff = alpha * static_cast<double>(curves);
  rep.lower.assign(k, kInfinity);
  rep.upper.assign(k, -kInfinity);
  for (std::size_t i = 0; i < curves; ++i) {
    if (static_cast<double>(at_least_as_extreme[i]) <= cutoff) continue;
    const auto& chi = curve_at(ens, i).chi;
    for (std::size_t t = 0; t < k; ++t) {
      rep.lower[t] = std::min(rep.lower[t], static_cast<double>(chi[t]));
      rep.upper[t] = std::max(rep.upper[t], static_cast<double>(chi[t]));
    }
  }

  const CriticalScale crit = critical_from(ens, table);
  rep.epsilon_crit = crit.epsilon;
  rep.crit_index = crit.index;
  rep.deviation = crit.deviation;
  return rep;
}

}  // namespace eccmark
