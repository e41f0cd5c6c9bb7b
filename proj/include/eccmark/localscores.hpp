#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eccmark/geometry.hpp"

namespace eccmark {

/// Per-point connectivity Z-scores at a fixed filtration scale.
struct ZScoreMap {
  double epsilon_crit = 0.0;
  std::vector<double> scores;
  std::vector<int> obs_degree;
  std::vector<double> perm_mean;
  std::vector<double> perm_sd;

  double mean_score() const;
};

/// deg(i) = #{j != i : d_M(i, j) <= epsilon} for the given marks.
std::vector<int> mark_weighted_degrees(std::span<const Point> points, std::span<const double> marks,
                                       double epsilon);

/// Observed mark-weighted degree of every point standardised against its
/// degree under s mark permutations (the same stream as the random-labeling
/// ensemble for `seed`). Sample standard deviation uses divisor s - 1; a point
/// with zero spread scores 0.
ZScoreMap local_z_scores(const MarkedPointPattern& pattern, double epsilon_crit, std::size_t s,
                         std::uint64_t seed);

}  // namespace eccmark
