#include "eccmark/localscores.hpp"

#include <cmath>
#include <numeric>

#include "eccmark/envelopes.hpp"
#include "eccmark/parallel.hpp"

namespace eccmark {

double ZScoreMap::mean_score() const {
  if (scores.empty()) return 0.0;
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::vector<int> mark_weighted_degrees(std::span<const Point> points, std::span<const double> marks,
                                       double epsilon) {
  const std::size_t n = points.size();
  std::vector<int> degree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (mark_weighted_distance(points[i], marks[i], points[j], marks[j]) <= epsilon) {
        ++degree[i];
        ++degree[j];
      }
    }
  }
  return degree;
}

ZScoreMap local_z_scores(const MarkedPointPattern& pattern, double epsilon_crit, std::size_t s,
                         std::uint64_t seed) {
  if (!(epsilon_crit > 0.0) || !std::isfinite(epsilon_crit)) {
    throw Error("critical scale must be positive and finite");
  }
  if (s < 2) throw Error("Z-scores need at least two permutations");
  const std::size_t n = pattern.size();
  const auto& pts = pattern.points();

  std::vector<std::vector<int>> perm_degrees(s);
  parallel_for(s, [&](std::size_t k) {
    const auto m = permuted_marks(pattern.marks(), seed, k + 1);
    perm_degrees[k] = mark_weighted_degrees(pts, m, epsilon_crit);
  });

  ZScoreMap out;
  out.epsilon_crit = epsilon_crit;
  out.obs_degree = mark_weighted_degrees(pts, pattern.marks(), epsilon_crit);
  out.perm_mean.assign(n, 0.0);
  out.perm_sd.assign(n, 0.0);
  out.scores.assign(n, 0.0);
  const double count = static_cast<double>(s);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < s; ++k) sum += perm_degrees[k][i];
    const double mean = sum / count;
    double ss = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      const double d = perm_degrees[k][i] - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (count - 1.0));
    out.perm_mean[i] = mean;
    out.perm_sd[i] = sd;
    out.scores[i] = sd > 0.0 ? (out.obs_degree[i] - mean) / sd : 0.0;
  }
  return out;
}

}  // namespace eccmark
