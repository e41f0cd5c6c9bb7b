#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eccmark/envelopes.hpp"
#include "eccmark/localscores.hpp"
#include "eccmark/simulators.hpp"

namespace eccmark {

enum class SpatialKind { csr, thomas, hardcore };
enum class MarkKind { random, positive, negative };

std::string to_string(SpatialKind kind);
std::string to_string(MarkKind kind);
SpatialKind spatial_kind_from_string(const std::string& name);
MarkKind mark_kind_from_string(const std::string& name);

/// One cell of the 3 x 3 simulation design.
struct ScenarioSpec {
  SpatialKind spatial = SpatialKind::csr;
  MarkKind marks = MarkKind::random;
  std::size_t n = 80;
  std::size_t s = 999;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t grid_size = 100;
  Window window{0.0, 10.0, 0.0, 10.0};
  /// Replace the default process or mark model for this cell.
  std::optional<SpatialModel> spatial_model;
  std::optional<MarkModel> mark_model;
};

/// csr: HPP at n/|W|; thomas: kappa 0.08, mu 10, sigma 0.7; hardcore: delta 0.9.
SpatialModel default_spatial_model(SpatialKind kind, const Window& window, std::size_t n);

/// random: U(0, 8). positive: GRF kriging under csr, cluster means under
/// thomas, sinusoid under hardcore. negative: checkerboard everywhere.
MarkModel default_mark_model(SpatialKind spatial, MarkKind marks);

/// One realisation of the scenario; locations and marks use separate streams
/// of `seed`.
MarkedPointPattern generate_pattern(const ScenarioSpec& spec, std::uint64_t seed);

struct ScenarioResult {
  MarkedPointPattern pattern;
  EulerCurve plain;
  EulerCurve marked;
  EnvelopeReport csr_report;
  EnvelopeReport marked_report;
  ZScoreMap zscores;
};

/// Realisation, both envelope tests and the Z-score map at the marked
/// test's critical scale.
ScenarioResult run_scenario(const ScenarioSpec& spec);

/// The scale used for Z-scores: epsilon_crit, or the first positive grid
/// value when the observed curve never deviates.
double zscore_scale(const EnvelopeReport& report);

/// Pointwise median and 2.5% / 97.5% quantiles over replicates.
struct Band {
  std::vector<double> grid;
  std::vector<double> median;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct BandSummary {
  Band plain;
  Band marked;
  std::size_t replicates = 0;
};

struct BandOptions {
  std::size_t grid_size = 100;
  std::size_t pilot = 20;
  /// Fixed grids; derived from the pilot when empty.
  std::vector<double> plain_grid;
  std::vector<double> marked_grid;
};

/// Grid end from a pilot: the 97.5% quantile of per-replicate automatic
/// scales for the plain and the marked distance.
std::pair<double, double> pilot_epsilon_max(const ScenarioSpec& spec, std::uint64_t seed, std::size_t pilot);

/// B independent realisations of the scenario, both ECCs per replicate,
/// summarised pointwise. spec.s is ignored.
BandSummary monte_carlo_bands(const ScenarioSpec& spec, std::size_t replicates, std::uint64_t seed,
                              const BandOptions& options = {});

/// Type-7 (linear interpolation) empirical quantile of unsorted data.
double quantile(std::vector<double> values, double prob);

}  // namespace eccmark
