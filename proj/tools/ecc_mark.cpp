#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "eccmark/cli.hpp"
#include "eccmark/parallel.hpp"

namespace {

using eccmark::cli::RunConfig;

struct Flags {
  std::string config_file;
  std::string window;
  std::string null = "both";
  std::string spatial;
  std::string marks;
  std::string epsilon_max;
  std::size_t threads = 0;
};

void add_common(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON configuration applied before the flags");
  cmd->add_option("--seed", c.seed, "Seed for every random stream");
  cmd->add_option("--threads", f.threads, "Worker threads (ECC_MARK_THREADS takes precedence)");
}

void add_test_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--s", c.s, "Number of null simulations");
  cmd->add_option("--alpha", c.alpha, "Test level");
  cmd->add_option("--K", c.K, "Number of grid points");
  cmd->add_option("--epsilon-max", f.epsilon_max, "Upper grid end, or 'auto'");
  cmd->add_option("--null", f.null, "csr, random_labeling or both");
}

void add_input_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--input", c.input, "CSV with columns x,y,mark")->required();
  cmd->add_option("--window", f.window, "Observation window x_min,x_max,y_min,y_max");
  cmd->add_flag("--infer-window", c.infer_window, "Use the bounding box of the points");
  cmd->add_flag("--standardize-marks", c.standardize_marks, "Centre marks and scale to unit variance");
}

void add_scenario_options(CLI::App* cmd, RunConfig& c, Flags& f) {
  cmd->add_option("--spatial", f.spatial, "csr, thomas or hardcore");
  cmd->add_option("--marks", f.marks, "random, positive or negative");
  cmd->add_option("--n", c.scenario.n, "Number of points");
  cmd->add_option("--window", f.window, "Simulation window x_min,x_max,y_min,y_max");
}

void finish(RunConfig& c, const Flags& f, const CLI::App& cmd) {
  if (!f.config_file.empty()) {
    // Flags given on the command line win over the file.
    RunConfig from_file = c;
    eccmark::cli::apply_json_file(f.config_file, from_file);
    for (const CLI::Option* opt : cmd.get_options()) {
      if (opt->count() > 0) continue;
      const std::string name = opt->get_name();
      if (name == "--seed") c.seed = from_file.seed;
      if (name == "--s") c.s = from_file.s;
      if (name == "--alpha") c.alpha = from_file.alpha;
      if (name == "--K") c.K = from_file.K;
      if (name == "--B") c.B = from_file.B;
      if (name == "--n") c.scenario.n = from_file.scenario.n;
      if (name == "--epsilon-max") c.epsilon_max = from_file.epsilon_max;
      if (name == "--null") c.null = from_file.null;
      if (name == "--window") {
        c.window = from_file.window;
        c.scenario.window = from_file.scenario.window;
      }
      if (name == "--infer-window") c.infer_window = from_file.infer_window;
      if (name == "--standardize-marks") c.standardize_marks = from_file.standardize_marks;
      if (name == "--spatial") {
        c.scenario.spatial = from_file.scenario.spatial;
        c.scenario.spatial_model = from_file.scenario.spatial_model;
      }
      if (name == "--marks") {
        c.scenario.marks = from_file.scenario.marks;
        c.scenario.mark_model = from_file.scenario.mark_model;
      }
    }
  }
  if (!f.window.empty()) {
    c.window = eccmark::cli::parse_window(f.window);
    c.scenario.window = *c.window;
  }
  if (!f.spatial.empty()) {
    c.scenario.spatial = eccmark::spatial_kind_from_string(f.spatial);
    c.scenario.spatial_model.reset();
  }
  if (!f.marks.empty()) {
    c.scenario.marks = eccmark::mark_kind_from_string(f.marks);
    c.scenario.mark_model.reset();
  }
  if (const CLI::Option* opt = cmd.get_option_no_throw("--null"); opt && opt->count() > 0) {
    c.null = eccmark::cli::null_selection_from_string(f.null);
  }
  if (!f.epsilon_max.empty()) {
    if (f.epsilon_max == "auto") {
      c.epsilon_max.reset();
    } else {
      try {
        c.epsilon_max = std::stod(f.epsilon_max);
      } catch (const std::exception&) {
        throw eccmark::Error("--epsilon-max must be a number or 'auto'");
      }
    }
  }
  if (c.scenario.spatial_model) c.scenario.spatial_model->window = c.scenario.window;
  c.scenario.s = c.s;
  c.scenario.alpha = c.alpha;
  c.scenario.grid_size = c.K;
  c.scenario.seed = c.seed;

  if (std::getenv("ECC_MARK_THREADS") == nullptr && f.threads > 0) eccmark::set_worker_count(f.threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mark-weighted Euler characteristic curves for marked point patterns"};
  app.require_subcommand(1);

  RunConfig config;
  Flags flags;
  double min_distance = 0.0;
  std::string verify_input;

  auto* test = app.add_subcommand("test", "Envelope tests and Z-scores for a CSV pattern");
  add_common(test, config, flags);
  add_input_options(test, config, flags);
  add_test_options(test, config, flags);
  test->add_option("--out", config.out, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Write one scenario realisation as CSV");
  add_common(simulate, config, flags);
  add_scenario_options(simulate, config, flags);
  simulate->add_option("--out", config.out, "Output CSV file (standard output when absent)");

  auto* scenario = app.add_subcommand("scenario", "Simulate a scenario and run both tests");
  add_common(scenario, config, flags);
  add_scenario_options(scenario, config, flags);
  add_test_options(scenario, config, flags);
  scenario->add_option("--out", config.out, "Output directory")->required();

  auto* bands = app.add_subcommand("bands", "Monte Carlo ECC bands for a scenario");
  add_common(bands, config, flags);
  add_scenario_options(bands, config, flags);
  bands->add_option("--B", config.B, "Replicates");
  bands->add_option("--K", config.K, "Number of grid points");
  bands->add_flag("--all", config.all_cells, "All nine spatial x mark cells");
  bands->add_option("--out", config.out, "Output directory")->required();

  auto* zscores = app.add_subcommand("zscores", "Local Z-scores for a CSV pattern");
  add_common(zscores, config, flags);
  add_input_options(zscores, config, flags);
  add_test_options(zscores, config, flags);
  zscores->add_option("--eps-crit", config.eps_crit, "Fixed scale instead of the random-labeling critical scale");
  zscores->add_option("--out", config.out, "Output directory")->required();

  auto* verify = app.add_subcommand("verify", "Check the minimum pairwise distance of a CSV pattern");
  verify->add_option("--input", verify_input, "CSV with columns x,y,mark")->required();
  verify->add_option("--min-distance", min_distance, "Required minimum separation")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return eccmark::cli::cmd_verify(verify_input, min_distance, std::cout);
    CLI::App* cmd = app.get_subcommands().front();
    finish(config, flags, *cmd);
    if (test->parsed()) return eccmark::cli::cmd_test(config, std::cout);
    if (simulate->parsed()) return eccmark::cli::cmd_simulate(config, std::cout);
    if (scenario->parsed()) return eccmark::cli::cmd_scenario(config, std::cout);
    if (bands->parsed()) return eccmark::cli::cmd_bands(config, std::cout);
    if (zscores->parsed()) return eccmark::cli::cmd_zscores(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "ecc-mark: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
