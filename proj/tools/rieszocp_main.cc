// Command-line driver: relax, solve, extract, simulate, pipeline, export-sdpa.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rieszocp/config.h"
#include "rieszocp/pipeline.h"

namespace rieszocp {
namespace {

struct CommonFlags {
  std::string config_path;
  std::string output_dir;
  double budget{0.0};
  int parallelism{0};
  bool verbose{false};
};

std::string cell_name(const std::string& prefix, int n, int r, const std::string& ext) {
  return prefix + "_N" + std::to_string(n) + "_r" + std::to_string(r) + ext;
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load(const CommonFlags& flags) {
  RunConfig config = load_config(flags.config_path);
  if (!flags.output_dir.empty()) config.output_directory = flags.output_dir;
  if (flags.budget > 0.0) config.solver.time_limit_s = flags.budget;
  if (flags.parallelism > 0) config.parallelism = flags.parallelism;
  config.solver.verbose = flags.verbose && config.parallelism == 1;
  return config;
}

void print_census(std::ostream& os, int n, int r, const Census& c) {
  os << "N=" << n << " r=" << r << ": " << c.variables << " moment variables (" << c.occupation_moments
     << " occupation, " << c.terminal_moments << " terminal), " << c.state_monomials << " state monomials, "
     << c.equalities << " equality rows, " << c.block_sizes.size() << " blocks\n";
  for (std::size_t i = 0; i < c.block_sizes.size(); ++i) {
    os << "  " << c.block_labels[i] << " [" << c.block_sizes[i] << "]\n";
  }
}

std::string census_csv(const std::vector<std::pair<std::pair<int, int>, Census>>& rows) {
  std::ostringstream os;
  os << "N,r,variables,occupation_moments,terminal_moments,state_monomials,equalities,blocks,block_sizes\n";
  for (const auto& [key, c] : rows) {
    std::string sizes;
    for (std::size_t i = 0; i < c.block_sizes.size(); ++i) sizes += (i ? ";" : "") + std::to_string(c.block_sizes[i]);
    os << key.first << ',' << key.second << ',' << c.variables << ',' << c.occupation_moments << ','
       << c.terminal_moments << ',' << c.state_monomials << ',' << c.equalities << ',' << c.block_sizes.size() << ','
       << sizes << '\n';
  }
  return os.str();
}

// relax and export-sdpa: build (and eliminate) every cell without solving.
int run_relax(const CommonFlags& flags, bool force_sdpa, const std::string& command) {
  const RunConfig config = load(flags);
  const bool sdpa = force_sdpa || config.write_sdpa;
  std::vector<std::pair<std::pair<int, int>, Census>> rows;
  std::vector<std::string> files;
  for (int n : config.n_modes) {
    const ModalSystem sys = make_system(config, n);
    const double extent = choose_time_extent(config, sys);
    for (int r : config.orders) {
      const SDPProblem p = make_problem(config, sys, r, extent);
      const Census c = census(p);
      if (!force_sdpa) print_census(std::cout, n, r, c);
      rows.push_back({{n, r}, c});
      if (sdpa) {
        const Elimination el = eliminate_equalities(p);
        if (!el.consistent) {
          std::cerr << "export-sdpa: N=" << n << " r=" << r << ": moment equalities are inconsistent\n";
          continue;
        }
        files.push_back(write_output(config.output_directory, cell_name("relaxation", n, r, ".dat-s"),
                                     format_sdpa(el.sdp)));
        std::cout << "wrote " << (std::filesystem::path(config.output_directory) / files.back()).string() << "\n";
      }
    }
  }
  files.push_back(write_output(config.output_directory, "census.csv", census_csv(rows)));
  std::cout << "manifest " << write_manifest(config.output_directory, files, command) << "\n";
  return 0;
}

void print_cell(std::ostream& os, const CellResult& c) {
  os << "N=" << c.n_modes << " r=" << c.order << " " << c.status << " bound=" << c.bound
     << " vars=" << c.census.variables << " it=" << c.iterations << " t=" << c.seconds << "s";
  if (c.simulation) os << " terminal_l2=" << c.simulation->report.terminal_l2;
  if (!c.error.empty()) os << " [" << c.error << "]";
  os << "\n";
}

// solve, extract, pipeline: the sweep with increasing stage sets.
int run_stages(const CommonFlags& flags, const Stages& stages, const std::string& command) {
  const RunConfig config = load(flags);
  const std::vector<CellResult> cells = run_sweep(config, stages);
  std::vector<std::string> files;
  for (const CellResult& c : cells) {
    print_cell(std::cout, c);
    if (c.controller) {
      files.push_back(write_output(config.output_directory, cell_name("controls", c.n_modes, c.order, ".csv"),
                                   c.controller->to_csv()));
    }
    if (c.simulation) {
      files.push_back(write_output(config.output_directory, cell_name("trace", c.n_modes, c.order, ".csv"),
                                   trace_csv(*c.simulation)));
      if (config.write_fields) {
        files.push_back(write_output(config.output_directory, cell_name("field", c.n_modes, c.order, ".csv"),
                                     c.simulation->field.to_csv()));
      }
    }
  }
  files.push_back(write_output(config.output_directory, "report.csv", report_csv(cells)));
  std::cout << "manifest " << write_manifest(config.output_directory, files, command) << "\n";
  return 0;
}

int run_simulate(const CommonFlags& flags, const std::string& controls_path, double horizon,
                 const std::string& command) {
  const RunConfig config = load(flags);
  const double T = horizon > 0.0 ? horizon : config.horizon.T;
  ControlPolynomial u = controls_path.empty() ? ControlPolynomial::constant(std::vector<double>(config.controls(), 0.0), T)
                                              : ControlPolynomial::from_csv(read_file(controls_path), T);
  if (u.components() != config.controls()) {
    throw std::invalid_argument("simulate: control table has " + std::to_string(u.components()) +
                                " components, model expects " + std::to_string(config.controls()));
  }
  SimResult sim;
  switch (config.model) {
    case ModelKind::Heat:
      sim = simulate_heat(u, config.epsilon, config.x0, T, config.heat);
      break;
    case ModelKind::Wave:
      sim = simulate_wave(u, config.epsilon, config.x0, T, config.wave);
      break;
    case ModelKind::Custom:
      throw std::invalid_argument("simulate: custom spectra have no PDE simulator");
  }
  std::vector<std::string> files;
  files.push_back(write_output(config.output_directory, "trace.csv", trace_csv(sim)));
  if (config.write_fields) files.push_back(write_output(config.output_directory, "field.csv", sim.field.to_csv()));
  std::cout << "T=" << T << " terminal_l2=" << sim.report.terminal_l2 << " clip_count=" << sim.report.clip_count
            << "\n";
  std::cout << "manifest " << write_manifest(config.output_directory, files, command) << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Moment-SDP lower bounds and controllers for modally truncated PDE control problems"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::string controls_path;
  double horizon = 0.0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", flags.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", flags.output_dir, "Overrides outputs.directory");
    sub->add_option("--budget", flags.budget, "Wall-time budget per SDP solve in seconds")
        ->check(CLI::PositiveNumber);
    sub->add_option("-j,--parallelism", flags.parallelism, "Concurrent sweep cells")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", flags.verbose, "Print solver iterations to stderr");
  };
  CLI::App* relax = app.add_subcommand("relax", "Build relaxations and print the variable/block census");
  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the (N, r) sweep and write report.csv");
  CLI::App* extract = app.add_subcommand("extract", "Solve and extract polynomial controls");
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate the PDE under a control table (zero by default)");
  CLI::App* pipeline = app.add_subcommand("pipeline", "Solve, extract and simulate every cell");
  CLI::App* export_sdpa = app.add_subcommand("export-sdpa", "Write every relaxation in SDPA sparse format");
  for (CLI::App* sub : {relax, solve_cmd, extract, simulate, pipeline, export_sdpa}) add_common(sub);
  simulate->add_option("--controls", controls_path, "Control table written by extract")->check(CLI::ExistingFile);
  simulate->add_option("--horizon", horizon, "Simulation horizon (defaults to horizon.T)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  const std::string command = command_line(argc, argv);
  try {
    if (*relax) return run_relax(flags, false, command);
    if (*export_sdpa) return run_relax(flags, true, command);
    if (*solve_cmd) return run_stages(flags, {}, command);
    if (*extract) return run_stages(flags, {.extract = true}, command);
    if (*pipeline) return run_stages(flags, {.extract = true, .simulate = true}, command);
    if (*simulate) return run_simulate(flags, controls_path, horizon, command);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace rieszocp

int main(int argc, char** argv) { return rieszocp::run(argc, argv); }
