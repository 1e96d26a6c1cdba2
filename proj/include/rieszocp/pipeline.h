#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rieszocp/config.h"
#include "rieszocp/extract.h"
#include "rieszocp/pdesim.h"
#include "rieszocp/relaxation.h"
#include "rieszocp/sdp.h"

namespace rieszocp {

ModalSystem make_system(const RunConfig& config, int n_modes);

/// Builds the relaxation with conditioning windows. `time_extent` > 0 scales
/// t to [0, time_extent] (free horizons only).
SDPProblem make_problem(const RunConfig& config, const ModalSystem& sys, int r, double time_extent = 0.0);

/// Internal time extent for a free horizon: the configured value, or for
/// "auto" four times the lowest-order bound (0 keeps the horizon).
double choose_time_extent(const RunConfig& config, const ModalSystem& sys);

/// Variable and block counts of one relaxation.
struct Census {
  int variables{0};
  int occupation_moments{0};
  int terminal_moments{0};
  int state_monomials{0};
  int equalities{0};
  std::vector<std::string> block_labels;
  std::vector<int> block_sizes;
};

Census census(const SDPProblem& problem);

struct SolvedRelaxation {
  SDPProblem problem;
  Elimination elimination;
  SolveReport report;
  Eigen::VectorXd moments;  // full (y, y^T) recovered from the solver iterate
  double time_extent{0.0};
};

SolvedRelaxation solve_relaxation(const RunConfig& config, int n_modes, int r);

/// Horizon over which an extracted controller acts: the bound for a free
/// horizon, T otherwise.
double control_horizon(const RunConfig& config, const SolvedRelaxation& solved);

struct Stages {
  bool extract{false};
  bool simulate{false};
};

struct CellResult {
  int n_modes{0};
  int order{0};
  std::string status;  // solver status, or "error" when a stage threw before solving
  double bound{0.0};
  double dual_bound{0.0};
  double primal_residual{0.0};
  double dual_residual{0.0};
  int iterations{0};
  double seconds{0.0};
  Census census;
  int free_variables{0};
  double time_extent{0.0};
  std::optional<ControlPolynomial> controller;
  std::optional<SimResult> simulation;
  std::optional<double> modal_terminal_norm;
  std::string error;  // "<stage>: <message>"
};

/// One (N, r) cell; stage failures are recorded, not thrown.
CellResult run_cell(const RunConfig& config, int n_modes, int r, const Stages& stages);

/// All cells of the sweep, ordered by N then r. Cells run concurrently up to
/// config.parallelism.
std::vector<CellResult> run_sweep(const RunConfig& config, const Stages& stages);

/// Report table with a fixed column set and fixed numeric formatting.
std::string report_csv(const std::vector<CellResult>& cells);

/// Per-time-level rows t,u,energy of a simulation (energy empty for heat).
std::string trace_csv(const SimResult& sim);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

/// Writes manifest.json listing each file (relative to `directory`) with its
/// size and SHA-256. Returns the manifest path.
std::string write_manifest(const std::string& directory, const std::vector<std::string>& files,
                           const std::string& command);

/// Writes `content` to directory/name, creating the directory, and returns the
/// relative name.
std::string write_output(const std::string& directory, const std::string& name, const std::string& content);

}  // namespace rieszocp
