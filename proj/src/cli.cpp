#include "eccmark/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "eccmark/envelopes.hpp"
#include "eccmark/io.hpp"
#include "eccmark/localscores.hpp"

namespace eccmark::cli {

using nlohmann::json;
namespace fs = std::filesystem;

NullSelection null_selection_from_string(const std::string& name) {
  if (name == "both") return NullSelection::both;
  if (name == "csr" || name == "csr_intensity") return NullSelection::csr;
  if (name == "random_labeling") return NullSelection::random_labeling;
  throw Error("unknown null selection '" + name + "' (expected csr, random_labeling or both)");
}

void RunConfig::validate() const {
  if (s < 1) throw Error("--s must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("--alpha must lie strictly between 0 and 1");
  if (K < 2) throw Error("--K must be at least 2");
  if (epsilon_max && !(std::isfinite(*epsilon_max) && *epsilon_max > 0.0))
    throw Error("--epsilon-max must be positive and finite");
  if (eps_crit && !(std::isfinite(*eps_crit) && *eps_crit > 0.0)) throw Error("--eps-crit must be positive");
  if (window && infer_window) throw Error("--window and --infer-window are mutually exclusive");
  if (B < 2) throw Error("--B must be at least 2");
  if (scenario.n < 1) throw Error("--n must be at least 1");
  if (scenario.spatial_model) scenario.spatial_model->validate();
  if (scenario.mark_model) eccmark::validate(*scenario.mark_model);
}

Window parse_window(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw Error("");
    } catch (const std::exception&) {
      throw Error("window '" + text + "' is not four comma-separated numbers");
    }
  }
  if (v.size() != 4) throw Error("window '" + text + "' must be x_min,x_max,y_min,y_max");
  return Window(v[0], v[1], v[2], v[3]);
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw Error("unknown key '" + key + "' in " + where);
  }
}

void apply_spatial(const json& j, RunConfig& c) {
  if (j.is_string()) {
    c.scenario.spatial = spatial_kind_from_string(j.get<std::string>());
    c.scenario.spatial_model.reset();
    return;
  }
  const std::string type = j.at("type").get<std::string>();
  const Window& w = c.scenario.window;
  if (type == "csr" || type == "hpp") {
    check_keys(j, {"type", "lambda"}, "spatial");
    c.scenario.spatial = SpatialKind::csr;
    if (j.contains("lambda")) c.scenario.spatial_model = SpatialModel{Hpp{j["lambda"].get<double>()}, w};
  } else if (type == "thomas") {
    check_keys(j, {"type", "kappa", "mu", "sigma"}, "spatial");
    Thomas t;
    t.kappa = j.value("kappa", t.kappa);
    t.mu = j.value("mu", t.mu);
    t.sigma = j.value("sigma", t.sigma);
    c.scenario.spatial = SpatialKind::thomas;
    c.scenario.spatial_model = SpatialModel{t, w};
  } else if (type == "hardcore") {
    check_keys(j, {"type", "delta", "lambda"}, "spatial");
    Hardcore h;
    h.lambda_proposal = j.value("lambda", static_cast<double>(c.scenario.n) / w.area());
    h.delta = j.value("delta", h.delta);
    c.scenario.spatial = SpatialKind::hardcore;
    c.scenario.spatial_model = SpatialModel{h, w};
  } else {
    throw Error("unknown spatial type '" + type + "'");
  }
}

void apply_marks(const json& j, RunConfig& c) {
  if (j.is_string()) {
    c.scenario.marks = mark_kind_from_string(j.get<std::string>());
    c.scenario.mark_model.reset();
    return;
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "random" || type == "positive" || type == "negative") {
    check_keys(j, {"type"}, "marks");
    c.scenario.marks = mark_kind_from_string(type);
    c.scenario.mark_model.reset();
  } else if (type == "iid_uniform") {
    check_keys(j, {"type", "lo", "hi"}, "marks");
    IidUniform m;
    m.lo = j.value("lo", m.lo);
    m.hi = j.value("hi", m.hi);
    c.scenario.marks = MarkKind::random;
    c.scenario.mark_model = m;
  } else if (type == "grf_kriging") {
    check_keys(j, {"type", "rho", "nugget", "grid_dim", "lo", "hi"}, "marks");
    GrfKriging m;
    m.rho = j.value("rho", m.rho);
    m.nugget = j.value("nugget", m.nugget);
    m.grid_dim = j.value("grid_dim", m.grid_dim);
    m.lo = j.value("lo", m.lo);
    m.hi = j.value("hi", m.hi);
    c.scenario.marks = MarkKind::positive;
    c.scenario.mark_model = m;
  } else if (type == "cluster_means") {
    check_keys(j, {"type", "levels", "noise_sd"}, "marks");
    ClusterMeans m;
    m.levels = j.value("levels", m.levels);
    m.noise_sd = j.value("noise_sd", m.noise_sd);
    c.scenario.marks = MarkKind::positive;
    c.scenario.mark_model = m;
  } else if (type == "sinusoid") {
    check_keys(j, {"type", "amplitude", "shift", "freq_x", "freq_y", "noise_sd", "lo", "hi"}, "marks");
    Sinusoid m;
    m.amplitude = j.value("amplitude", m.amplitude);
    m.shift = j.value("shift", m.shift);
    m.freq_x = j.value("freq_x", m.freq_x);
    m.freq_y = j.value("freq_y", m.freq_y);
    m.noise_sd = j.value("noise_sd", m.noise_sd);
    m.lo = j.value("lo", m.lo);
    m.hi = j.value("hi", m.hi);
    c.scenario.marks = MarkKind::positive;
    c.scenario.mark_model = m;
  } else if (type == "checkerboard") {
    check_keys(j, {"type", "cell", "low", "high", "noise_sd"}, "marks");
    Checkerboard m;
    m.cell = j.value("cell", m.cell);
    m.low = j.value("low", m.low);
    m.high = j.value("high", m.high);
    m.noise_sd = j.value("noise_sd", m.noise_sd);
    c.scenario.marks = MarkKind::negative;
    c.scenario.mark_model = m;
  } else {
    throw Error("unknown marks type '" + type + "'");
  }
}

}  // namespace

void apply_json(const json& j, RunConfig& c) {
  check_keys(j,
             {"spatial", "marks", "n", "s", "seed", "alpha", "K", "epsilon_max", "window", "null", "B",
              "infer_window", "standardize_marks"},
             "configuration");
  try {
    if (j.contains("window")) {
      const auto w = j["window"].get<std::vector<double>>();
      if (w.size() != 4) throw Error("window must have four numbers");
      c.window = Window(w[0], w[1], w[2], w[3]);
      c.scenario.window = *c.window;
    }
    if (j.contains("n")) c.scenario.n = j["n"].get<std::size_t>();
    if (j.contains("spatial")) apply_spatial(j["spatial"], c);
    if (j.contains("marks")) apply_marks(j["marks"], c);
    if (j.contains("s")) c.s = j["s"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("K")) c.K = j["K"].get<std::size_t>();
    if (j.contains("epsilon_max")) {
      if (j["epsilon_max"].is_string() && j["epsilon_max"] == "auto") {
        c.epsilon_max.reset();
      } else {
        c.epsilon_max = j["epsilon_max"].get<double>();
      }
    }
    if (j.contains("null")) c.null = null_selection_from_string(j["null"].get<std::string>());
    if (j.contains("B")) c.B = j["B"].get<std::size_t>();
    if (j.contains("infer_window")) c.infer_window = j["infer_window"].get<bool>();
    if (j.contains("standardize_marks")) c.standardize_marks = j["standardize_marks"].get<bool>();
  } catch (const json::exception& e) {
    throw Error(std::string("configuration: ") + e.what());
  }
}

void apply_json_file(const fs::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  apply_json(j, config);
}

MarkedPointPattern load_pattern(const RunConfig& config) {
  if (!config.input) throw Error("an --input CSV file is required");
  io::PointTable table = io::read_pattern_csv(*config.input);
  Window window = config.window ? *config.window : Window::bounding_box(table.points);
  if (!config.window && !config.infer_window) {
    throw Error("no observation window: pass --window x_min,x_max,y_min,y_max or --infer-window");
  }
  for (const Point& p : table.points) {
    if (!window.contains(p)) throw Error("input point lies outside the observation window");
  }
  if (config.standardize_marks) table.marks = standardized_marks(table.marks);
  return MarkedPointPattern(std::move(table.points), std::move(table.marks), window);
}

namespace {

template <class Writer>
std::string render(Writer&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

GridPolicy grid_policy(const RunConfig& c) {
  GridPolicy p;
  p.size = c.K;
  p.epsilon_max = c.epsilon_max;
  return p;
}

struct TestOutcome {
  std::optional<CurveEnsemble> csr;
  std::optional<CurveEnsemble> marked;
  std::optional<EnvelopeReport> csr_report;
  std::optional<EnvelopeReport> marked_report;
};

TestOutcome run_tests(const MarkedPointPattern& pattern, const RunConfig& c) {
  TestOutcome t;
  const GridPolicy policy = grid_policy(c);
  if (c.null != NullSelection::random_labeling) {
    t.csr = csr_ensemble(pattern, c.s, c.seed, policy);
    t.csr_report = rank_envelope(*t.csr, c.alpha);
  }
  if (c.null != NullSelection::csr) {
    t.marked = random_labeling_ensemble(pattern, c.s, c.seed, policy);
    t.marked_report = rank_envelope(*t.marked, c.alpha);
  }
  return t;
}

nlohmann::ordered_json reports_json(const MarkedPointPattern& pattern, const TestOutcome& t) {
  nlohmann::ordered_json j;
  j["schema"] = io::kReportSchema;
  j["n"] = pattern.size();
  const Window& w = pattern.window();
  j["window"] = {w.x_min(), w.x_max(), w.y_min(), w.y_max()};
  j["tests"] = nlohmann::ordered_json::array();
  if (t.csr_report) j["tests"].push_back(io::report_json(*t.csr_report));
  if (t.marked_report) j["tests"].push_back(io::report_json(*t.marked_report));
  return j;
}

void print_summaries(const TestOutcome& t, std::ostream& log) {
  if (t.csr_report) log << io::summary_line(*t.csr_report) << '\n';
  if (t.marked_report) log << io::summary_line(*t.marked_report) << '\n';
}

// Z-scores live on the marked scale; fall back to the unmarked critical scale
// when only the CSR test ran.
ZScoreMap z_scores_for(const MarkedPointPattern& pattern, const TestOutcome& t, const RunConfig& c) {
  const EnvelopeReport& r = t.marked_report ? *t.marked_report : *t.csr_report;
  return local_z_scores(pattern, zscore_scale(r), std::max<std::size_t>(c.s, 2), c.seed);
}

void write_outcome(const fs::path& dir, const MarkedPointPattern& pattern, const TestOutcome& t, const ZScoreMap& z,
                   const std::string& title) {
  const CurveEnsemble& primary = t.marked ? *t.marked : *t.csr;
  io::write_file(dir / "curves.csv", render([&](std::ostream& o) { io::write_curve_csv(o, primary.observed); }));
  if (t.marked && t.csr) {
    io::write_file(dir / "curves_plain.csv", render([&](std::ostream& o) { io::write_curve_csv(o, t.csr->observed); }));
  }
  const DistanceKind kind = t.marked ? DistanceKind::mark_weighted : DistanceKind::euclidean;
  const DistanceMatrix dist = pairwise_matrix(pattern, kind);
  const PersistenceDiagram diagram = compute_persistence(build_filtration(dist, primary.grid.back()));
  io::write_file(dir / "diagram.csv", render([&](std::ostream& o) { io::write_diagram_csv(o, diagram); }));
  io::write_file(dir / "report.json", reports_json(pattern, t).dump(2) + "\n");
  io::write_file(dir / "zscores.csv", render([&](std::ostream& o) { io::write_zscores_csv(o, pattern, z); }));
  io::write_file(dir / "figure.svg",
                 io::scenario_svg(pattern, t.csr_report ? &*t.csr_report : nullptr,
                                  t.marked_report ? &*t.marked_report : nullptr, &z, title));
}

void require_out(const RunConfig& c) {
  if (c.out.empty()) throw Error("an --out directory is required");
}

}  // namespace

int cmd_test(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_out(config);
  const MarkedPointPattern pattern = load_pattern(config);
  const TestOutcome t = run_tests(pattern, config);
  const ZScoreMap z = z_scores_for(pattern, t, config);
  write_outcome(config.out, pattern, t, z, config.input->filename().string());
  print_summaries(t, log);
  return 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate();
  const MarkedPointPattern pattern = generate_pattern(config.scenario, config.seed);
  const std::string csv = render([&](std::ostream& o) { io::write_pattern_csv(o, pattern); });
  if (config.out.empty()) {
    log << csv;
  } else {
    io::write_file(config.out, csv);
  }
  return 0;
}

int cmd_scenario(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_out(config);
  const MarkedPointPattern pattern = generate_pattern(config.scenario, config.seed);
  io::write_file(config.out / "pattern.csv", render([&](std::ostream& o) { io::write_pattern_csv(o, pattern); }));
  const TestOutcome t = run_tests(pattern, config);
  const ZScoreMap z = z_scores_for(pattern, t, config);
  write_outcome(config.out, pattern, t, z,
                to_string(config.scenario.spatial) + " / " + to_string(config.scenario.marks));
  print_summaries(t, log);
  return 0;
}

int cmd_bands(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_out(config);
  BandOptions options;
  options.grid_size = config.K;

  std::vector<ScenarioSpec> cells;
  if (config.all_cells) {
    for (SpatialKind sp : {SpatialKind::csr, SpatialKind::thomas, SpatialKind::hardcore}) {
      for (MarkKind mk : {MarkKind::random, MarkKind::positive, MarkKind::negative}) {
        ScenarioSpec spec = config.scenario;
        spec.spatial = sp;
        spec.marks = mk;
        spec.spatial_model.reset();
        spec.mark_model.reset();
        cells.push_back(spec);
      }
    }
  } else {
    cells.push_back(config.scenario);
  }

  std::vector<io::BandPanel> panels;
  for (const ScenarioSpec& spec : cells) {
    const std::string name = to_string(spec.spatial) + "_" + to_string(spec.marks);
    BandSummary bands = monte_carlo_bands(spec, config.B, config.seed, options);
    const fs::path dir = config.all_cells ? config.out / name : config.out;
    io::write_file(dir / "bands_plain.csv", render([&](std::ostream& o) { io::write_band_csv(o, bands.plain); }));
    io::write_file(dir / "bands_marked.csv", render([&](std::ostream& o) { io::write_band_csv(o, bands.marked); }));
    log << "cell=" << name << " replicates=" << bands.replicates
        << " plain_end=" << io::format_number(bands.plain.grid.back())
        << " marked_end=" << io::format_number(bands.marked.grid.back()) << '\n';
    panels.push_back({to_string(spec.spatial) + " / " + to_string(spec.marks), std::move(bands)});
  }
  io::write_file(config.out / "figure.svg", io::bands_svg(panels, config.all_cells ? 3 : 1));
  return 0;
}

int cmd_zscores(const RunConfig& config, std::ostream& log) {
  config.validate();
  require_out(config);
  const MarkedPointPattern pattern = load_pattern(config);
  double scale = 0.0;
  std::optional<EnvelopeReport> report;
  if (config.eps_crit) {
    scale = *config.eps_crit;
  } else {
    report = rank_envelope(random_labeling_ensemble(pattern, config.s, config.seed, grid_policy(config)), config.alpha);
    scale = zscore_scale(*report);
    log << io::summary_line(*report) << '\n';
  }
  const ZScoreMap z = local_z_scores(pattern, scale, std::max<std::size_t>(config.s, 2), config.seed);
  io::write_file(config.out / "zscores.csv", render([&](std::ostream& o) { io::write_zscores_csv(o, pattern, z); }));
  io::write_file(config.out / "figure.svg", io::scenario_svg(pattern, nullptr, report ? &*report : nullptr, &z,
                                                             config.input->filename().string()));
  log << "eps_crit=" << io::format_number(scale) << " mean_z=" << io::format_number(z.mean_score()) << '\n';
  return 0;
}

int cmd_verify(const fs::path& path, double min_distance, std::ostream& log) {
  const io::PointTable table = io::read_pattern_csv(path);
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    for (std::size_t j = i + 1; j < table.points.size(); ++j) {
      smallest = std::min(smallest, euclidean_distance(table.points[i], table.points[j]));
    }
  }
  const bool ok = !(smallest < min_distance);
  log << "points=" << table.points.size() << " min_distance=" << io::format_number(smallest)
      << (ok ? " ok" : " violated") << '\n';
  return ok ? 0 : 1;
}

}  // namespace eccmark::cli
