#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eccmark/filtration.hpp"
#include "eccmark/geometry.hpp"

namespace eccmark {

enum class NullKind { random_labeling, csr_intensity };

std::string to_string(NullKind kind);
NullKind null_kind_from_string(const std::string& name);

/// How the shared epsilon grid of an ensemble is chosen.
struct GridPolicy {
  std::size_t size = 100;
  /// Fixed upper end; automatic when absent.
  std::optional<double> epsilon_max;
  /// Permutations inspected when extending the automatic scale (random
  /// labeling only).
  std::size_t pilot = 20;
  /// Explicit grid; overrides size and epsilon_max when non-empty.
  std::vector<double> grid;
};

/// Observed curve plus s simulated curves, all on one grid.
struct CurveEnsemble {
  std::vector<double> grid;
  EulerCurve observed;
  std::vector<EulerCurve> simulated;
  NullKind null_kind = NullKind::random_labeling;
  std::uint64_t seed = 0;
};

/// The j-th mark permutation (j >= 1) of the random-labeling stream for seed.
std::vector<std::size_t> mark_permutation(std::size_t n, std::uint64_t seed, std::size_t j);

std::vector<double> permuted_marks(std::span<const double> marks, std::uint64_t seed, std::size_t j);

/// Upper grid end for a random-labeling ensemble: the observed automatic
/// scale, extended to cover the first `pilot` permutations (bounded by the
/// euclidean MST scale times exp(mark range)).
double random_labeling_epsilon_max(const MarkedPointPattern& pattern, std::uint64_t seed,
                                   std::size_t pilot);

/// Mark-weighted ECC of the pattern against s permutations of its marks.
CurveEnsemble random_labeling_ensemble(const MarkedPointPattern& pattern, std::size_t s,
                                       std::uint64_t seed, const GridPolicy& policy = {});

/// Unmarked ECC of the pattern against s inhomogeneous Poisson patterns drawn
/// from its kernel intensity (CvL bandwidth).
CurveEnsemble csr_ensemble(const MarkedPointPattern& pattern, std::size_t s, std::uint64_t seed,
                           const GridPolicy& policy = {});

/// ECC of an unmarked location set; an empty set gives an all-zero curve.
EulerCurve plain_curve(std::span<const Point> points, std::span<const double> grid);

struct EnvelopeReport {
  NullKind null_kind = NullKind::random_labeling;
  std::size_t s = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::vector<double> grid;
  std::vector<int> observed;
  std::vector<double> lower;
  std::vector<double> upper;
  double p_value = 1.0;
  /// Minimum two-sided pointwise rank of the observed curve.
  double extreme_rank_obs = 0.0;
  /// Observed midrank from below at each grid point.
  std::vector<double> rank_profile;
  double epsilon_crit = 0.0;
  std::size_t crit_index = 0;
  double deviation = 0.0;
  std::string generator;

  bool rejected() const { return p_value <= alpha; }
  /// Grid indices where the observed curve leaves the envelope.
  std::vector<std::size_t> exits_below() const;
  std::vector<std::size_t> exits_above() const;
};

/// Per-curve ranks shared by the envelope and the critical scale.
struct RankTable {
  /// two_sided[i][t] = min(midrank from below, midrank from above).
  std::vector<std::vector<double>> two_sided;
  /// below[i][t] = midrank from below.
  std::vector<std::vector<double>> below;
};

RankTable pointwise_ranks(const CurveEnsemble& ensemble);

/// Global extreme-rank envelope test.
///
/// Curves are ordered by extreme rank length: each curve's pointwise
/// two-sided midranks are sorted ascending and compared lexicographically, so
/// the minimum rank decides first and later ranks break its ties. The
/// p-value counts the simulations at least as extreme as the observation,
/// p = (1 + #{j : ERL_j <= ERL_obs}) / (s + 1). The envelope spans the curves
/// that are not among the alpha(s+1) most extreme.
EnvelopeReport rank_envelope(const CurveEnsemble& ensemble, double alpha);

struct CriticalScale {
  double epsilon = 0.0;
  double deviation = 0.0;
  std::size_t index = 0;
};

/// argmax over the grid of |midrank_below(observed) - (s+2)/2|, smallest
/// epsilon on ties.
CriticalScale critical_scale(const CurveEnsemble& ensemble);

}  // namespace eccmark
