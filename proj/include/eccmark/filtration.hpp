#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "eccmark/geometry.hpp"

namespace eccmark {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Vertex, edge or triangle of a Vietoris-Rips complex. Unused vertex slots
/// hold kNoVertex.
struct Simplex {
  static constexpr std::uint32_t kNoVertex = std::numeric_limits<std::uint32_t>::max();

  std::array<std::uint32_t, 3> vertices{kNoVertex, kNoVertex, kNoVertex};
  std::uint8_t dim = 0;
  double value = 0.0;
};

/// Strict weak order used for filtrations: value, then dimension, then
/// lexicographic vertex tuple.
bool filtration_less(const Simplex& a, const Simplex& b);

/// Vietoris-Rips 2-skeleton of a distance matrix, truncated at epsilon_max and
/// sorted by filtration_less.
class Filtration {
 public:
  Filtration(std::size_t n, double epsilon_max, std::vector<Simplex> simplices);

  std::size_t vertex_count() const { return n_; }
  double epsilon_max() const { return epsilon_max_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  std::size_t count(int dim) const;

 private:
  std::size_t n_;
  double epsilon_max_;
  std::vector<Simplex> simplices_;
};

Filtration build_filtration(const DistanceMatrix& dist, double epsilon_max);

struct PersistencePair {
  double birth = 0.0;
  double death = kInfinity;

  bool essential() const { return death == kInfinity; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

struct PersistenceDiagram {
  std::vector<PersistencePair> dim0;
  std::vector<PersistencePair> dim1;
};

/// Persistent homology in dimensions 0 and 1 over the two-element field.
///
/// Dimension 0 is read off a union-find sweep over the edges. Dimension 1 is
/// obtained by reducing the coboundary matrix of the edges in reverse
/// filtration order; edges that merged components are cleared up front. The
/// resulting pairs coincide with those of the standard boundary-matrix
/// reduction. Every vertex contributes one dimension-0 pair; dimension-1
/// pairs with zero persistence are dropped.
PersistenceDiagram compute_persistence(const Filtration& filtration);

/// Betti numbers and Euler characteristic sampled on an epsilon grid.
struct EulerCurve {
  std::vector<double> grid;
  std::vector<int> beta0;
  std::vector<int> beta1;
  std::vector<int> chi;

  std::size_t size() const { return grid.size(); }
  friend bool operator==(const EulerCurve&, const EulerCurve&) = default;
};

/// beta_k(eps) = #{(b, d) in dim k : b <= eps < d}; chi = beta0 - beta1.
EulerCurve betti_curves(const PersistenceDiagram& diagram, std::span<const double> grid);

/// Full pipeline: filtration truncated at grid.back(), persistence, curves.
EulerCurve euler_curve(const DistanceMatrix& dist, std::span<const double> grid);

/// Largest edge of a minimum spanning tree (0 for a single point).
double mst_max_edge(const DistanceMatrix& dist);

/// Latest finite dimension-1 death of the untruncated 2-skeleton, 0 if the
/// complex never carries a loop.
double last_loop_death(const DistanceMatrix& dist);

/// 1.2 x the smallest scale at which the complex is connected and loop-free.
/// Returns 0 when every pairwise distance is 0 or n = 1.
double auto_epsilon_max(const DistanceMatrix& dist);

/// K evenly spaced values from 0 to epsilon_max (endpoints exact).
std::vector<double> linear_grid(double epsilon_max, std::size_t k);

/// linear_grid(auto_epsilon_max(dist), k), falling back to [0, 1] when the
/// automatic scale is degenerate.
std::vector<double> default_grid(const DistanceMatrix& dist, std::size_t k);

}  // namespace eccmark
