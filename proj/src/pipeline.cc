#include "rieszocp/pipeline.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

namespace rieszocp {

namespace fs = std::filesystem;

ModalSystem make_system(const RunConfig& config, int n_modes) {
  return truncate_and_realify(config.spectral_model(), n_modes, config.bounds, config.horizon);
}

SDPProblem make_problem(const RunConfig& config, const ModalSystem& sys, int r, double time_extent) {
  RelaxationOptions options;
  options.test_degree = config.test_degree;
  options.scaling_windows =
      conditioning_windows(sys, config.control_set(), sys.horizon().is_free() ? time_extent : 0.0);
  return build_relaxation(sys, config.control_set(), config.cost, r, options);
}

double choose_time_extent(const RunConfig& config, const ModalSystem& sys) {
  if (!sys.horizon().is_free()) return 0.0;
  switch (config.time_window.kind) {
    case TimeWindow::Kind::Horizon:
      return 0.0;
    case TimeWindow::Kind::Fixed:
      return std::min(config.time_window.extent, sys.horizon().T);
    case TimeWindow::Kind::Auto:
      break;
  }
  // A cheap lowest-order solve locates the time scale of the optimal
  // occupation measure; the relaxation value itself does not depend on it.
  const ControlSet cs = config.control_set();
  const int r0 = minimal_order(cs, config.cost);
  const SDPProblem p = make_problem(config, sys, r0, 0.0);
  const Elimination el = eliminate_equalities(p);
  if (!el.consistent) return 0.0;
  SolverOptions opt = config.solver;
  opt.verbose = false;
  const SolveReport rep = solve(el.sdp, opt);
  if (rep.status != SolveStatus::Optimal) return 0.0;
  const double mass = p.occupation(el.recovery.recover(rep.x)).to_physical().mass();
  const double T0 = sys.horizon().T;
  if (!(mass > 1e-6 * T0)) return 0.0;
  return std::min(T0, 4.0 * mass);
}

Census census(const SDPProblem& p) {
  Census c;
  c.variables = p.num_variables();
  c.occupation_moments = p.occupation_basis->size();
  c.terminal_moments = p.terminal_basis->size();
  c.state_monomials = p.state_monomial_count();
  c.equalities = static_cast<int>(p.equalities.rows());
  for (const AffineBlock& b : p.blocks) {
    c.block_labels.push_back(b.spec.label);
    c.block_sizes.push_back(b.size);
  }
  return c;
}

namespace {

SolvedRelaxation build_and_eliminate(const RunConfig& config, int n_modes, int r) {
  SolvedRelaxation out;
  const ModalSystem sys = make_system(config, n_modes);
  out.time_extent = choose_time_extent(config, sys);
  out.problem = make_problem(config, sys, r, out.time_extent);
  out.elimination = eliminate_equalities(out.problem);
  return out;
}

void solve_eliminated(const RunConfig& config, SolvedRelaxation& out) {
  if (!out.elimination.consistent) {
    out.report.status = SolveStatus::Infeasible;
    out.report.message = "moment equalities are inconsistent";
    out.moments = out.elimination.recovery.base;
    return;
  }
  out.report = solve(out.elimination.sdp, config.solver);
  out.moments = out.elimination.recovery.recover(out.report.x);
}

}  // namespace

SolvedRelaxation solve_relaxation(const RunConfig& config, int n_modes, int r) {
  SolvedRelaxation out = build_and_eliminate(config, n_modes, r);
  solve_eliminated(config, out);
  return out;
}

double control_horizon(const RunConfig& config, const SolvedRelaxation& solved) {
  if (!config.horizon.is_free()) return config.horizon.T;
  return solved.report.objective;
}

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::scientific << std::setprecision(9) << v;
  return os.str();
}

std::string status_name(const CellResult& c) { return c.status.empty() ? "error" : c.status; }

}  // namespace

CellResult run_cell(const RunConfig& config, int n_modes, int r, const Stages& stages) {
  CellResult cell;
  cell.n_modes = n_modes;
  cell.order = r;
  std::string stage = "relax";
  try {
    SolvedRelaxation solved = build_and_eliminate(config, n_modes, r);
    cell.census = census(solved.problem);
    cell.free_variables = solved.elimination.sdp.nvar;
    cell.time_extent = solved.time_extent;
    stage = "solve";
    solve_eliminated(config, solved);
    const SolveReport& rep = solved.report;
    cell.status = to_string(rep.status);
    cell.bound = rep.objective;
    cell.dual_bound = rep.dual_objective;
    cell.primal_residual = rep.primal_residual;
    cell.dual_residual = rep.dual_residual;
    cell.iterations = rep.iterations;
    cell.seconds = rep.seconds;
    if (rep.status == SolveStatus::Infeasible) return cell;

    if (stages.extract || stages.simulate) {
      stage = "extract";
      const double horizon = control_horizon(config, solved);
      const MomentVector y = solved.problem.occupation(solved.moments);
      cell.controller = extract_controller(y, r, solved.problem.controls, horizon);
    }
    if (stages.simulate) {
      stage = "simulate";
      const double T = cell.controller->horizon;
      if (!(T > 0.0)) throw std::runtime_error("nonpositive horizon " + format_number(T));
      switch (config.model) {
        case ModelKind::Heat:
          cell.simulation = simulate_heat(*cell.controller, config.epsilon, config.x0, T, config.heat);
          break;
        case ModelKind::Wave:
          cell.simulation = simulate_wave(*cell.controller, config.epsilon, config.x0, T, config.wave);
          break;
        case ModelKind::Custom:
          break;
      }
      const ModalSystem sys = make_system(config, n_modes);
      const ModalTrajectory traj = simulate_modes(sys, *cell.controller, T, std::min(config.modal_dt, T));
      cell.modal_terminal_norm = traj.states.back().norm();
    }
  } catch (const std::exception& e) {
    cell.error = stage + ": " + e.what();
    if (cell.status.empty()) cell.status = "error";
  }
  return cell;
}

std::vector<CellResult> run_sweep(const RunConfig& config, const Stages& stages) {
  std::vector<std::pair<int, int>> cells;
  for (int n : config.n_modes) {
    for (int r : config.orders) cells.emplace_back(n, r);
  }
  std::vector<CellResult> out(cells.size());
  const std::size_t width = std::max(1, config.parallelism);
  for (std::size_t start = 0; start < cells.size(); start += width) {
    std::vector<std::future<CellResult>> running;
    for (std::size_t i = start; i < std::min(cells.size(), start + width); ++i) {
      running.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, [&, i] {
        return run_cell(config, cells[i].first, cells[i].second, stages);
      }));
    }
    for (std::size_t i = 0; i < running.size(); ++i) out[start + i] = running[i].get();
  }
  return out;
}

std::string report_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "N,r,status,bound,dual_bound,primal_residual,dual_residual,iterations,seconds,variables,free_variables,"
        "state_monomials,blocks,block_sizes,time_extent,controller_degree,terminal_l2,modal_terminal_norm,"
        "clip_count,error\n";
  for (const CellResult& c : cells) {
    std::string sizes;
    for (std::size_t i = 0; i < c.census.block_sizes.size(); ++i) {
      sizes += (i ? ";" : "") + std::to_string(c.census.block_sizes[i]);
    }
    std::string error = c.error;
    for (char& ch : error) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    os << c.n_modes << ',' << c.order << ',' << status_name(c) << ',' << format_number(c.bound) << ','
       << format_number(c.dual_bound) << ',' << format_number(c.primal_residual) << ','
       << format_number(c.dual_residual) << ',' << c.iterations << ',' << std::fixed << std::setprecision(3)
       << c.seconds << std::defaultfloat << ',' << c.census.variables << ',' << c.free_variables << ','
       << c.census.state_monomials << ',' << c.census.block_sizes.size() << ',' << sizes << ','
       << format_number(c.time_extent) << ',' << (c.controller ? c.controller->degree() : -1) << ','
       << (c.simulation ? format_number(c.simulation->report.terminal_l2) : "") << ','
       << (c.modal_terminal_norm ? format_number(*c.modal_terminal_norm) : "") << ','
       << (c.simulation ? std::to_string(c.simulation->report.clip_count) : "") << ',' << error << '\n';
  }
  return os.str();
}

std::string trace_csv(const SimResult& sim) {
  std::ostringstream os;
  os << "t,u,energy\n";
  const std::vector<double>& u = sim.report.control_trace;
  const std::vector<double>& e = sim.report.energy_trace;
  for (std::size_t n = 0; n < sim.field.times.size(); ++n) {
    os << format_number(sim.field.times[n]) << ',' << (n < u.size() ? format_number(u[n]) : "") << ','
       << (n < e.size() ? format_number(e[n]) : "") << '\n';
  }
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string write_output(const std::string& directory, const std::string& name, const std::string& content) {
  const fs::path path = fs::path(directory) / name;
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  return name;
}

std::string write_manifest(const std::string& directory, const std::vector<std::string>& files,
                           const std::string& command) {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["files"] = nlohmann::ordered_json::array();
  for (const std::string& name : files) {
    const fs::path path = fs::path(directory) / name;
    nlohmann::ordered_json entry;
    entry["path"] = name;
    entry["bytes"] = fs::file_size(path);
    entry["sha256"] = sha256_file(path.string());
    doc["files"].push_back(entry);
  }
  return (fs::path(directory) / write_output(directory, "manifest.json", doc.dump(2) + "\n")).string();
}

}  // namespace rieszocp
