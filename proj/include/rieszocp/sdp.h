#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rieszocp/relaxation.h"

namespace rieszocp {

/// Upper-triangular entry of a symmetric coefficient matrix.
struct SymEntry {
  int row;
  int col;
  double value;
};

/// One LMI block  A_0 + sum_i x_i A_i >= 0. Coefficient matrices are stored
/// as upper-triangular triplets tagged with their variable (-1 for A_0).
struct SdpBlock {
  int size{0};
  bool diagonal{false};
  std::vector<BlockTerm> terms;

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

/// minimize c.x + offset  subject to  A_0^b + sum_i x_i A_i^b >= 0 for all b.
struct StandardSDP {
  int nvar{0};
  std::vector<SdpBlock> blocks;
  Eigen::VectorXd objective;
  double objective_offset{0.0};

  void validate() const;
  double objective_value(const Eigen::VectorXd& x) const { return objective.dot(x) + objective_offset; }
  /// Smallest eigenvalue over all blocks at x.
  double min_eigenvalue(const Eigen::VectorXd& x) const;
};

/// v = base + basis * w.
struct AffineRecovery {
  Eigen::VectorXd base;
  Eigen::SparseMatrix<double> basis;

  Eigen::VectorXd recover(const Eigen::VectorXd& w) const { return base + basis * w; }
};

struct Elimination {
  bool consistent{true};
  double residual{0.0};  // |E v0 - f| for the particular solution v0
  int rank{0};
  StandardSDP sdp;
  AffineRecovery recovery;
  // Index of the source block for every block of `sdp` (-1 if synthetic).
  std::vector<int> block_origin;
};

/// Parameterizes the solutions of E v = f and substitutes them into the
/// blocks and the objective.
///
/// With `reduce_point_terminals`, a terminal interval collapsed to a point c
/// first contributes the equalities y^T_{a+e_k} = c y^T_a (implied by the
/// localizer -(z_k-c)^2 together with the moment matrix); the terminal
/// blocks are then restricted to monomials free of z_k and localizers that
/// became identically zero are dropped. The feasible set is unchanged but
/// the reduced problem regains a strictly feasible point.
Elimination eliminate_equalities(const SDPProblem& problem, bool reduce_point_terminals = true);

/// Same, for a bare system (rows of E given sparsely) and blocks over v.
Elimination eliminate_equalities(const Eigen::SparseMatrix<double, Eigen::RowMajor>& E, const Eigen::VectorXd& f,
                                 const std::vector<SdpBlock>& blocks, const Eigen::VectorXd& objective,
                                 double objective_offset, const std::vector<int>& column_priority = {});

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double tol_gap{1e-8};
  double tol_feas{1e-8};
  int max_iter{200};
  double time_limit_s{600.0};
  // Runs the dense kernel in long double (slower, about three more digits).
  bool extended_precision{false};
  bool verbose{false};
};

struct IterationRecord {
  int iteration;
  double primal_objective;
  double dual_objective;
  double primal_residual;
  double dual_residual;
  double mu;
  double step_primal;
  double step_dual;
};

struct SolveReport {
  SolveStatus status{SolveStatus::NumericalFailure};
  std::string message;
  double objective{0.0};       // primal (minimization) objective at x
  double dual_objective{0.0};  // lower bound from the dual iterate
  Eigen::VectorXd x;
  int iterations{0};
  double primal_residual{0.0};
  double dual_residual{0.0};
  double gap{0.0};
  double seconds{0.0};
  std::vector<IterationRecord> history;
};

/// Primal-dual path-following (Nesterov-Todd direction, Mehrotra predictor-corrector)
/// with dense per-block linear algebra.
SolveReport solve(const StandardSDP& sdp, const SolverOptions& options = {});

/// Writes the SDPA sparse format (.dat-s).
void export_sdpa(const StandardSDP& sdp, const std::string& path);
std::string format_sdpa(const StandardSDP& sdp);

}  // namespace rieszocp
