#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "eccmark/geometry.hpp"
#include "eccmark/random.hpp"

namespace eccmark {

// ---------------------------------------------------------------------------
// Intensity estimation

/// Piecewise-constant intensity on a square raster over a window. Cell values
/// are exact cell averages of the Gaussian kernel sum, rescaled so that the
/// raster integrates to the number of points it was estimated from.
class IntensityGrid {
 public:
  IntensityGrid(Window window, std::size_t resolution, double bandwidth, std::vector<double> values,
                double raw_mass);

  const Window& window() const { return window_; }
  std::size_t resolution() const { return resolution_; }
  double bandwidth() const { return bandwidth_; }
  /// Row-major, row index along y.
  const std::vector<double>& values() const { return values_; }
  /// Kernel mass inside the window before rescaling (edge loss shows here).
  double raw_mass() const { return raw_mass_; }

  double value_at(const Point& u) const;
  double max_value() const;
  double integral() const;

 private:
  Window window_;
  std::size_t resolution_;
  double bandwidth_;
  std::vector<double> values_;
  double raw_mass_;
};

/// Isotropic Gaussian kernel sum at u: sum_i exp(-|u-x_i|^2 / 2h^2) / (2 pi h^2).
double kernel_sum(std::span<const Point> points, double bandwidth, const Point& u);

/// Kernel mass of the whole sum inside a window (erf-based, exact).
double kernel_mass(std::span<const Point> points, double bandwidth, const Window& window);

/// |sum_i 1 / lambda_h(x_i) - area(W)|, the Cronie-van Lieshout criterion.
double cvl_discrepancy(std::span<const Point> points, double bandwidth, const Window& window);

/// 32 log-spaced bandwidths from 0.005 to 0.5 window diagonals.
std::vector<double> cvl_candidates(const Window& window);

/// Candidate minimising cvl_discrepancy (first one on ties).
double cvl_bandwidth(std::span<const Point> points, const Window& window);

inline constexpr std::size_t kDefaultRasterResolution = 128;

/// Kernel intensity raster; bandwidth chosen by cvl_bandwidth when absent.
IntensityGrid kernel_intensity(std::span<const Point> points, const Window& window,
                               std::optional<double> bandwidth,
                               std::size_t resolution = kDefaultRasterResolution);

// ---------------------------------------------------------------------------
// Spatial processes

struct Hpp {
  double lambda = 0.8;
};

/// Poisson parents at rate kappa in the window, Poisson(mu) offspring per
/// parent displaced by N(0, sigma^2 I).
struct Thomas {
  double kappa = 0.08;
  double mu = 10.0;
  double sigma = 0.7;
  std::size_t max_attempts = 100000;
};

/// Sequential dart throwing with minimum separation delta.
struct Hardcore {
  double lambda_proposal = 0.8;
  double delta = 0.9;
  std::size_t budget = 1000000;
};

/// Inhomogeneous Poisson process by thinning.
struct Ipp {
  IntensityGrid intensity;
};

struct SpatialModel {
  std::variant<Hpp, Thomas, Hardcore, Ipp> process;
  Window window;

  void validate() const;
};

struct SpatialSample {
  std::vector<Point> points;
  /// Cluster index per point for cluster processes, empty otherwise.
  std::vector<int> cluster;
};

SpatialSample simulate_spatial(const SpatialModel& model, std::optional<std::size_t> n_target,
                               Rng& rng);
SpatialSample simulate_spatial(const SpatialModel& model, std::optional<std::size_t> n_target,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Mark models

struct IidUniform {
  double lo = 0.0;
  double hi = 8.0;
};

/// Exponential-covariance Gaussian field on a grid_dim x grid_dim lattice,
/// kriged to the points and linearly rescaled to [lo, hi].
struct GrfKriging {
  double rho = 9.0;
  double nugget = 0.001;
  std::size_t grid_dim = 20;
  double lo = 0.0;
  double hi = 8.0;
};

/// Cluster c gets levels[c % levels.size()] plus Gaussian noise.
struct ClusterMeans {
  std::vector<double> levels{0.0, 8.0};
  double noise_sd = 0.01;
};

/// amplitude * sin(freq_x * x) * cos(freq_y * y) + shift, clipped to [lo, hi],
/// plus Gaussian noise. Coordinates are relative to the window origin.
struct Sinusoid {
  double amplitude = 4.0;
  double shift = 4.0;
  double freq_x = 12.0 * std::numbers::pi / 4.5;
  double freq_y = 2.0 * std::numbers::pi / 2.5;
  double noise_sd = 0.05;
  double lo = 0.0;
  double hi = 8.0;
};

/// Block index floor(x / cell) + floor(y / cell) relative to the window
/// origin; even blocks get `low`, odd blocks `high`, each plus noise.
struct Checkerboard {
  double cell = 2.5;
  double low = 0.0;
  double high = 8.0;
  double noise_sd = 0.01;
};

using MarkModel = std::variant<IidUniform, GrfKriging, ClusterMeans, Sinusoid, Checkerboard>;

void validate(const MarkModel& model);

std::vector<double> simulate_marks(const MarkModel& model, const SpatialSample& locations,
                                   const Window& window, Rng& rng);
std::vector<double> simulate_marks(const MarkModel& model, const SpatialSample& locations,
                                   const Window& window, std::uint64_t seed);

/// One draw of the lattice field together with the kriging weights K^-1 z.
struct GaussianFieldSample {
  std::vector<Point> nodes;
  std::vector<double> z;
  std::vector<double> weights;
};

/// Lattice nodes span the window edges inclusively.
std::vector<Point> lattice_nodes(const Window& window, std::size_t grid_dim);

GaussianFieldSample sample_gaussian_field(const GrfKriging& model, const Window& window, Rng& rng);

/// k(x)^T K^-1 z at each location (before rescaling).
std::vector<double> krige(const GaussianFieldSample& field, double rho, std::span<const Point> at);

/// Linear map of values onto [lo, hi]; constant input maps to the midpoint.
std::vector<double> rescale(std::span<const double> values, double lo, double hi);

}  // namespace eccmark
