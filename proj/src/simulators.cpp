#include "eccmark/simulators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace eccmark {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::size_t poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return static_cast<std::size_t>(std::poisson_distribution<long>(mean)(rng));
}

Point uniform_point(Rng& rng, const Window& w) {
  std::uniform_real_distribution<double> ux(w.x_min(), w.x_max()), uy(w.y_min(), w.y_max());
  const double x = ux(rng);
  return {x, uy(rng)};
}

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) throw Error(std::string(what) + " must be positive and finite");
}

void require_nonnegative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw Error(std::string(what) + " must be non-negative and finite");
}

// CDF differences of a 1-d Gaussian centred at c over consecutive raster edges.
void axis_masses(double c, double h, double lo, double step, std::size_t cells, std::vector<double>& out) {
  out.resize(cells);
  double prev = std_normal_cdf((lo - c) / h);
  for (std::size_t k = 0; k < cells; ++k) {
    const double next = std_normal_cdf((lo + step * static_cast<double>(k + 1) - c) / h);
    out[k] = next - prev;
    prev = next;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Intensity

IntensityGrid::IntensityGrid(Window window, std::size_t resolution, double bandwidth,
                             std::vector<double> values, double raw_mass)
    : window_(window), resolution_(resolution), bandwidth_(bandwidth), values_(std::move(values)),
      raw_mass_(raw_mass) {
  if (resolution_ == 0 || values_.size() != resolution_ * resolution_) {
    throw Error("intensity raster size does not match its resolution");
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("intensity values must be finite and non-negative");
  }
}

double IntensityGrid::value_at(const Point& u) const {
  const double fx = (u.x - window_.x_min()) / window_.width() * static_cast<double>(resolution_);
  const double fy = (u.y - window_.y_min()) / window_.height() * static_cast<double>(resolution_);
  const auto last = static_cast<double>(resolution_ - 1);
  const auto ix = static_cast<std::size_t>(std::clamp(std::floor(fx), 0.0, last));
  const auto iy = static_cast<std::size_t>(std::clamp(std::floor(fy), 0.0, last));
  return values_[iy * resolution_ + ix];
}

double IntensityGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double IntensityGrid::integral() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * window_.area() / static_cast<double>(resolution_ * resolution_);
}

double kernel_sum(std::span<const Point> points, double bandwidth, const Point& u) {
  const double two_h2 = 2.0 * bandwidth * bandwidth;
  double sum = 0.0;
  for (const Point& p : points) {
    const double dx = u.x - p.x, dy = u.y - p.y;
    sum += std::exp(-(dx * dx + dy * dy) / two_h2);
  }
  return sum / (kTwoPi * bandwidth * bandwidth);
}

double kernel_mass(std::span<const Point> points, double bandwidth, const Window& w) {
  double mass = 0.0;
  for (const Point& p : points) {
    const double mx = std_normal_cdf((w.x_max() - p.x) / bandwidth) - std_normal_cdf((w.x_min() - p.x) / bandwidth);
    const double my = std_normal_cdf((w.y_max() - p.y) / bandwidth) - std_normal_cdf((w.y_min() - p.y) / bandwidth);
    mass += mx * my;
  }
  return mass;
}

double cvl_discrepancy(std::span<const Point> points, double bandwidth, const Window& window) {
  double sum = 0.0;
  for (const Point& p : points) sum += 1.0 / kernel_sum(points, bandwidth, p);
  return std::abs(sum - window.area());
}

std::vector<double> cvl_candidates(const Window& window) {
  constexpr std::size_t kCount = 32;
  const double lo = 0.005 * window.diagonal();
  const double hi = 0.5 * window.diagonal();
  std::vector<double> out(kCount);
  for (std::size_t k = 0; k < kCount; ++k) {
    out[k] = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(kCount - 1));
  }
  return out;
}

double cvl_bandwidth(std::span<const Point> points, const Window& window) {
  if (points.empty()) throw Error("bandwidth selection needs at least one point");
  const auto candidates = cvl_candidates(window);
  double best = candidates.front();
  double best_score = std::numeric_limits<double>::infinity();
  for (double h : candidates) {
    const double score = cvl_discrepancy(points, h, window);
    if (score < best_score) {
      best_score = score;
      best = h;
    }
  }
  return best;
}

IntensityGrid kernel_intensity(std::span<const Point> points, const Window& window,
                               std::optional<double> bandwidth, std::size_t resolution) {
  if (points.empty()) throw Error("kernel intensity needs at least one point");
  if (resolution == 0) throw Error("raster resolution must be positive");
  const double h = bandwidth ? *bandwidth : cvl_bandwidth(points, window);
  require_positive(h, "bandwidth");

  const double sx = window.width() / static_cast<double>(resolution);
  const double sy = window.height() / static_cast<double>(resolution);
  std::vector<double> mass(resolution * resolution, 0.0);
  std::vector<double> mx, my;
  for (const Point& p : points) {
    axis_masses(p.x, h, window.x_min(), sx, resolution, mx);
    axis_masses(p.y, h, window.y_min(), sy, resolution, my);
    for (std::size_t iy = 0; iy < resolution; ++iy) {
      if (my[iy] == 0.0) continue;
      double* row = mass.data() + iy * resolution;
      for (std::size_t ix = 0; ix < resolution; ++ix) row[ix] += my[iy] * mx[ix];
    }
  }
  double raw = 0.0;
  for (double m : mass) raw += m;
  if (!(raw > 0.0)) throw Error("kernel mass inside the window vanished; bandwidth too small");

  const double cell_area = sx * sy;
  const double scale = static_cast<double>(points.size()) / raw;
  for (double& m : mass) m = m * scale / cell_area;
  return IntensityGrid(window, resolution, h, std::move(mass), raw);
}

// ---------------------------------------------------------------------------
// Spatial processes

void SpatialModel::validate() const {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hpp>) {
          require_positive(p.lambda, "HPP intensity");
        } else if constexpr (std::is_same_v<T, Thomas>) {
          require_positive(p.kappa, "Thomas parent intensity");
          require_positive(p.mu, "Thomas mean offspring count");
          require_nonnegative(p.sigma, "Thomas dispersion");
        } else if constexpr (std::is_same_v<T, Hardcore>) {
          require_positive(p.lambda_proposal, "hard-core intensity");
          require_nonnegative(p.delta, "hard-core distance");
          if (p.budget == 0) throw Error("hard-core proposal budget must be positive");
        }
      },
      process);
}

namespace {

SpatialSample sample_hpp(const Hpp& p, const Window& w, std::optional<std::size_t> n_target, Rng& rng) {
  const std::size_t n = n_target ? *n_target : poisson(rng, p.lambda * w.area());
  SpatialSample out;
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.points.push_back(uniform_point(rng, w));
  return out;
}

SpatialSample thomas_once(const Thomas& p, const Window& w, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  SpatialSample out;
  const std::size_t parents = poisson(rng, p.kappa * w.area());
  int cluster = 0;
  for (std::size_t k = 0; k < parents; ++k) {
    const Point parent = uniform_point(rng, w);
    const std::size_t offspring = poisson(rng, p.mu);
    bool kept = false;
    for (std::size_t j = 0; j < offspring; ++j) {
      const double dx = p.sigma * gauss(rng);
      const double dy = p.sigma * gauss(rng);
      const Point child{parent.x + dx, parent.y + dy};
      if (!w.contains(child)) continue;
      out.points.push_back(child);
      out.cluster.push_back(cluster);
      kept = true;
    }
    if (kept) ++cluster;
  }
  return out;
}

SpatialSample sample_thomas(const Thomas& p, const Window& w, std::optional<std::size_t> n_target, Rng& rng) {
  if (!n_target) return thomas_once(p, w, rng);
  for (std::size_t attempt = 0; attempt < p.max_attempts; ++attempt) {
    SpatialSample s = thomas_once(p, w, rng);
    if (s.points.size() == *n_target) return s;
  }
  throw Error("Thomas sampler found no realisation with exactly " + std::to_string(*n_target) +
              " points in " + std::to_string(p.max_attempts) + " attempts");
}

SpatialSample sample_hardcore(const Hardcore& p, const Window& w, std::optional<std::size_t> n_target,
                              Rng& rng) {
  const std::size_t n = n_target ? *n_target
                                 : static_cast<std::size_t>(std::llround(p.lambda_proposal * w.area()));
  // Hexagonal packing of discs of radius delta/2 in the window dilated by delta/2.
  const double disc = std::numbers::pi * p.delta * p.delta / 4.0;
  const double room = (w.width() + p.delta) * (w.height() + p.delta) * std::numbers::pi / (2.0 * std::sqrt(3.0));
  if (static_cast<double>(n) * disc > room) {
    throw Error("hard-core target of " + std::to_string(n) + " points at distance " + std::to_string(p.delta) +
                " exceeds the packing bound of the window");
  }
  SpatialSample out;
  out.points.reserve(n);
  const double d2 = p.delta * p.delta;
  std::size_t proposals = 0;
  while (out.points.size() < n) {
    if (proposals == p.budget) {
      throw Error("hard-core sampler exhausted its budget of " + std::to_string(p.budget) +
                  " proposals after accepting " + std::to_string(out.points.size()) + " of " +
                  std::to_string(n) + " points");
    }
    ++proposals;
    const Point c = uniform_point(rng, w);
    const bool ok = std::none_of(out.points.begin(), out.points.end(), [&](const Point& q) {
      const double dx = c.x - q.x, dy = c.y - q.y;
      return dx * dx + dy * dy < d2;
    });
    if (ok) out.points.push_back(c);
  }
  return out;
}

SpatialSample sample_ipp(const Ipp& p, const Window& w, std::optional<std::size_t> n_target, Rng& rng) {
  const IntensityGrid& lambda = p.intensity;
  const double top = lambda.max_value();
  SpatialSample out;
  if (!(top > 0.0)) return out;
  std::uniform_real_distribution<double> accept(0.0, 1.0);
  auto one_round = [&] {
    SpatialSample s;
    const std::size_t proposals = poisson(rng, top * w.area());
    for (std::size_t i = 0; i < proposals; ++i) {
      const Point u = uniform_point(rng, w);
      if (accept(rng) * top < lambda.value_at(u)) s.points.push_back(u);
    }
    return s;
  };
  if (!n_target) return one_round();
  // Conditioning on the count: keep thinning until enough points, then cut.
  while (out.points.size() < *n_target) {
    SpatialSample s = one_round();
    out.points.insert(out.points.end(), s.points.begin(), s.points.end());
  }
  out.points.resize(*n_target);
  return out;
}

}  // namespace

SpatialSample simulate_spatial(const SpatialModel& model, std::optional<std::size_t> n_target, Rng& rng) {
  model.validate();
  return std::visit(
      [&](const auto& p) -> SpatialSample {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Hpp>) return sample_hpp(p, model.window, n_target, rng);
        if constexpr (std::is_same_v<T, Thomas>) return sample_thomas(p, model.window, n_target, rng);
        if constexpr (std::is_same_v<T, Hardcore>) return sample_hardcore(p, model.window, n_target, rng);
        if constexpr (std::is_same_v<T, Ipp>) return sample_ipp(p, model.window, n_target, rng);
      },
      model.process);
}

SpatialSample simulate_spatial(const SpatialModel& model, std::optional<std::size_t> n_target,
                               std::uint64_t seed) {
  Rng rng = make_rng(seed, StreamDomain::locations, 0);
  return simulate_spatial(model, n_target, rng);
}

// ---------------------------------------------------------------------------
// Marks

void validate(const MarkModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidUniform>) {
          if (!(m.lo < m.hi)) throw Error("uniform marks need lo < hi");
        } else if constexpr (std::is_same_v<T, GrfKriging>) {
          require_positive(m.rho, "GRF range");
          require_nonnegative(m.nugget, "GRF nugget");
          if (m.grid_dim < 2) throw Error("GRF lattice needs grid_dim >= 2");
          if (!(m.lo < m.hi)) throw Error("GRF rescaling needs lo < hi");
        } else if constexpr (std::is_same_v<T, ClusterMeans>) {
          if (m.levels.empty()) throw Error("cluster means need at least one level");
          require_nonnegative(m.noise_sd, "cluster mark noise");
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          require_nonnegative(m.noise_sd, "sinusoid noise");
          if (!(m.lo < m.hi)) throw Error("sinusoid clipping needs lo < hi");
        } else if constexpr (std::is_same_v<T, Checkerboard>) {
          require_positive(m.cell, "checkerboard cell size");
          require_nonnegative(m.noise_sd, "checkerboard noise");
        }
      },
      model);
}

std::vector<Point> lattice_nodes(const Window& w, std::size_t grid_dim) {
  std::vector<Point> nodes;
  nodes.reserve(grid_dim * grid_dim);
  const double steps = static_cast<double>(grid_dim - 1);
  for (std::size_t iy = 0; iy < grid_dim; ++iy) {
    for (std::size_t ix = 0; ix < grid_dim; ++ix) {
      nodes.push_back({w.x_min() + w.width() * static_cast<double>(ix) / steps,
                       w.y_min() + w.height() * static_cast<double>(iy) / steps});
    }
  }
  return nodes;
}

GaussianFieldSample sample_gaussian_field(const GrfKriging& model, const Window& window, Rng& rng) {
  GaussianFieldSample field;
  field.nodes = lattice_nodes(window, model.grid_dim);
  const auto m = static_cast<Eigen::Index>(field.nodes.size());
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      cov(j, k) = std::exp(-euclidean_distance(field.nodes[j], field.nodes[k]) / model.rho);
    }
    cov(j, j) += model.nugget;
  }
  Eigen::LLT<Eigen::MatrixXd> chol(cov);
  if (chol.info() != Eigen::Success) {
    throw Error("Cholesky factorisation of the field covariance failed; increase the nugget (currently " +
                std::to_string(model.nugget) + ")");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd white(m);
  for (Eigen::Index j = 0; j < m; ++j) white(j) = gauss(rng);
  const Eigen::VectorXd z = chol.matrixL() * white;
  const Eigen::VectorXd weights = chol.solve(z);
  field.z.assign(z.data(), z.data() + m);
  field.weights.assign(weights.data(), weights.data() + m);
  return field;
}

std::vector<double> krige(const GaussianFieldSample& field, double rho, std::span<const Point> at) {
  std::vector<double> out;
  out.reserve(at.size());
  for (const Point& x : at) {
    double v = 0.0;
    for (std::size_t j = 0; j < field.nodes.size(); ++j) {
      v += std::exp(-euclidean_distance(x, field.nodes[j]) / rho) * field.weights[j];
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> rescale(std::span<const double> values, double lo, double hi) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto [mn, mx] = std::minmax_element(out.begin(), out.end());
  const double a = *mn, b = *mx;
  for (double& v : out) v = b > a ? lo + (hi - lo) * (v - a) / (b - a) : 0.5 * (lo + hi);
  return out;
}

std::vector<double> simulate_marks(const MarkModel& model, const SpatialSample& locations,
                                   const Window& window, Rng& rng) {
  validate(model);
  const auto& pts = locations.points;
  for (const Point& p : pts) {
    if (!window.contains(p)) throw Error("mark simulation received a location outside the window");
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> marks;
  marks.reserve(pts.size());

  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IidUniform>) {
          std::uniform_real_distribution<double> u(m.lo, m.hi);
          for (std::size_t i = 0; i < pts.size(); ++i) marks.push_back(u(rng));
        } else if constexpr (std::is_same_v<T, GrfKriging>) {
          const auto field = sample_gaussian_field(m, window, rng);
          marks = rescale(krige(field, m.rho, pts), m.lo, m.hi);
        } else if constexpr (std::is_same_v<T, ClusterMeans>) {
          if (locations.cluster.size() != pts.size()) {
            throw Error("cluster-mean marks need cluster labels from a cluster process");
          }
          for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto c = static_cast<std::size_t>(locations.cluster[i]);
            marks.push_back(m.levels[c % m.levels.size()] + m.noise_sd * gauss(rng));
          }
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          for (const Point& p : pts) {
            const double x = p.x - window.x_min(), y = p.y - window.y_min();
            const double base = m.amplitude * std::sin(m.freq_x * x) * std::cos(m.freq_y * y) + m.shift;
            marks.push_back(std::clamp(base, m.lo, m.hi) + m.noise_sd * gauss(rng));
          }
        } else if constexpr (std::is_same_v<T, Checkerboard>) {
          for (const Point& p : pts) {
            const auto bx = static_cast<long long>(std::floor((p.x - window.x_min()) / m.cell));
            const auto by = static_cast<long long>(std::floor((p.y - window.y_min()) / m.cell));
            const double level = (bx + by) % 2 == 0 ? m.low : m.high;
            marks.push_back(level + m.noise_sd * gauss(rng));
          }
        }
      },
      model);
  return marks;
}

std::vector<double> simulate_marks(const MarkModel& model, const SpatialSample& locations,
                                   const Window& window, std::uint64_t seed) {
  Rng rng = make_rng(seed, StreamDomain::marks, 0);
  return simulate_marks(model, locations, window, rng);
}

}  // namespace eccmark
