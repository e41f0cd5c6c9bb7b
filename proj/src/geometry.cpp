#include "eccmark/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eccmark {

Window::Window(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(y_min) ||
      !std::isfinite(y_max)) {
    throw Error("window bounds must be finite");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw Error("window requires x_min < x_max and y_min < y_max");
  }
}

double Window::diagonal() const { return std::hypot(width(), height()); }

bool Window::contains(const Point& p) const {
  return p.x >= x_min_ && p.x <= x_max_ && p.y >= y_min_ && p.y <= y_max_;
}

Window Window::bounding_box(std::span<const Point> points) {
  if (points.empty()) throw Error("cannot infer a window from zero points");
  auto [xlo, xhi] = std::minmax_element(points.begin(), points.end(),
                                        [](const Point& a, const Point& b) { return a.x < b.x; });
  auto [ylo, yhi] = std::minmax_element(points.begin(), points.end(),
                                        [](const Point& a, const Point& b) { return a.y < b.y; });
  double x0 = xlo->x, x1 = xhi->x, y0 = ylo->y, y1 = yhi->y;
  if (!(x0 < x1)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y0 < y1)) { y0 -= 0.5; y1 += 0.5; }
  return Window(x0, x1, y0, y1);
}

MarkedPointPattern::MarkedPointPattern(std::vector<Point> points, std::vector<double> marks,
                                       Window window)
    : points_(std::move(points)), marks_(std::move(marks)), window_(window) {
  if (points_.empty()) throw Error("a marked point pattern needs at least one point");
  if (points_.size() != marks_.size()) {
    throw Error("point count (" + std::to_string(points_.size()) + ") and mark count (" +
                std::to_string(marks_.size()) + ") differ");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw Error("point " + std::to_string(i) + " has a non-finite coordinate");
    }
    if (!window_.contains(points_[i])) {
      throw Error("point " + std::to_string(i) + " lies outside the window");
    }
    if (!std::isfinite(marks_[i])) {
      throw Error("mark " + std::to_string(i) + " is not finite");
    }
  }
}

MarkedPointPattern MarkedPointPattern::with_marks(std::vector<double> marks) const {
  return MarkedPointPattern(points_, std::move(marks), window_);
}

std::string to_string(DistanceKind kind) {
  return kind == DistanceKind::euclidean ? "euclidean" : "mark_weighted";
}

double euclidean_distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double mark_weighted_distance(const Point& a, double m_a, const Point& b, double m_b) {
  return euclidean_distance(a, b) * std::exp(std::abs(m_a - m_b));
}

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> entries, DistanceKind kind)
    : n_(n), entries_(std::move(entries)), kind_(kind) {
  if (entries_.size() != n_ * n_) throw Error("distance matrix entry count mismatch");
}

DistanceMatrix pairwise_matrix(std::span<const Point> points, std::span<const double> marks,
                               DistanceKind kind) {
  const std::size_t n = points.size();
  if (n == 0) throw Error("pairwise_matrix needs at least one point");
  if (kind == DistanceKind::mark_weighted && marks.size() != n) {
    throw Error("pairwise_matrix: mark count does not match point count");
  }
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = kind == DistanceKind::euclidean
                           ? euclidean_distance(points[i], points[j])
                           : mark_weighted_distance(points[i], marks[i], points[j], marks[j]);
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return DistanceMatrix(n, std::move(d), kind);
}

DistanceMatrix pairwise_matrix(const MarkedPointPattern& pattern, DistanceKind kind) {
  return pairwise_matrix(pattern.points(), pattern.marks(), kind);
}

std::vector<double> standardized_marks(std::span<const double> marks) {
  std::vector<double> out(marks.begin(), marks.end());
  if (out.size() < 2) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  double ss = 0.0;
  for (double m : out) ss += (m - mean) * (m - mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.size() - 1));
  for (double& m : out) m = sd > 0.0 ? (m - mean) / sd : 0.0;
  return out;
}

}  // namespace eccmark
