#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "eccmark/geometry.hpp"
#include "eccmark/scenarios.hpp"
#include "json.hpp"

namespace eccmark::cli {

enum class NullSelection { csr, random_labeling, both };

NullSelection null_selection_from_string(const std::string& name);

/// Everything a subcommand needs; validated before any computation.
struct RunConfig {
  /// Data file for `test` and `zscores`.
  std::optional<std::filesystem::path> input;
  /// Scenario for `simulate`, `scenario` and `bands`.
  ScenarioSpec scenario;

  NullSelection null = NullSelection::both;
  std::size_t s = 999;
  double alpha = 0.05;
  std::size_t K = 100;
  std::optional<double> epsilon_max;
  std::uint64_t seed = 0;
  std::filesystem::path out;

  std::optional<Window> window;
  bool infer_window = false;
  bool standardize_marks = false;

  /// Bands: replicates and whether to run all nine design cells.
  std::size_t B = 1000;
  bool all_cells = false;
  /// zscores: fixed scale; taken from a random-labeling test when absent.
  std::optional<double> eps_crit;

  void validate() const;
};

/// Parses "x_min,x_max,y_min,y_max".
Window parse_window(const std::string& text);

/// Applies a JSON configuration on top of `config`. Recognised keys: spatial,
/// marks (a design name or an object with "type" and parameters), n, s, seed,
/// alpha, K, epsilon_max, window, null, B, infer_window, standardize_marks.
void apply_json(const nlohmann::json& j, RunConfig& config);
void apply_json_file(const std::filesystem::path& path, RunConfig& config);

/// Reads the input CSV and attaches the configured or inferred window.
MarkedPointPattern load_pattern(const RunConfig& config);

// Each command writes its artifacts under config.out and its summary to `log`.
int cmd_test(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_scenario(const RunConfig& config, std::ostream& log);
int cmd_bands(const RunConfig& config, std::ostream& log);
int cmd_zscores(const RunConfig& config, std::ostream& log);

/// Smallest pairwise distance of the pattern in `path`; exit 1 when below
/// `min_distance`.
int cmd_verify(const std::filesystem::path& path, double min_distance, std::ostream& log);

}  // namespace eccmark::cli
