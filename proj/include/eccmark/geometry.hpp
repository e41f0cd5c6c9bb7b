#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace eccmark {

/// Raised for invalid inputs anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned rectangular observation window.
class Window {
 public:
  Window(double x_min, double x_max, double y_min, double y_max);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  double diagonal() const;

  /// Inclusive on all four edges.
  bool contains(const Point& p) const;

  /// Smallest window containing every point. A degenerate extent is padded
  /// by half a unit on each side.
  static Window bounding_box(std::span<const Point> points);

  friend bool operator==(const Window&, const Window&) = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
};

/// Point locations with one real mark each, all inside a window.
class MarkedPointPattern {
 public:
  MarkedPointPattern(std::vector<Point> points, std::vector<double> marks, Window window);

  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<double>& marks() const { return marks_; }
  const Window& window() const { return window_; }

  /// Same locations and window, different marks.
  MarkedPointPattern with_marks(std::vector<double> marks) const;

 private:
  std::vector<Point> points_;
  std::vector<double> marks_;
  Window window_;
};

enum class DistanceKind { euclidean, mark_weighted };

std::string to_string(DistanceKind kind);

double euclidean_distance(const Point& a, const Point& b);

/// d(a,b) * exp(|m_a - m_b|)
double mark_weighted_distance(const Point& a, double m_a, const Point& b, double m_b);

/// Dense symmetric n x n matrix with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix(std::size_t n, std::vector<double> entries, DistanceKind kind);

  std::size_t size() const { return n_; }
  DistanceKind kind() const { return kind_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }
  const std::vector<double>& entries() const { return entries_; }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> entries_;
  DistanceKind kind_;
};

DistanceMatrix pairwise_matrix(const MarkedPointPattern& pattern, DistanceKind kind);

/// Mark-weighted matrix for the pattern's locations under an alternative mark
/// vector. Used by permutation ensembles to avoid copying the pattern.
DistanceMatrix pairwise_matrix(std::span<const Point> points, std::span<const double> marks,
                               DistanceKind kind);

/// Marks rescaled to zero mean and unit sample standard deviation. Constant
/// marks map to all zeros.
std::vector<double> standardized_marks(std::span<const double> marks);

}  // namespace eccmark
