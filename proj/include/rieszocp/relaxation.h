#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rieszocp/liouville.h"
#include "rieszocp/multi_index.h"
#include "rieszocp/polynomial.h"
#include "rieszocp/spectral.h"

namespace rieszocp {

/// x_scaled = scale * x + shift.
struct AffineMap {
  double scale{1.0};
  double shift{0.0};

  double apply(double x) const { return scale * x + shift; }
  double invert(double y) const { return (y - shift) / scale; }
  static AffineMap onto_unit(Interval from);  // maps [lo, hi] onto [-1, 1]
};

/// Per-slot affine maps between physical and internal coordinates. Control
/// slots are never rescaled.
struct VariableScaling {
  VarLayout layout;
  std::vector<AffineMap> maps;  // one per slot

  static VariableScaling identity(VarLayout layout);
  const AffineMap& time() const { return maps[0]; }

  /// Rewrites a polynomial in physical variables in terms of internal ones.
  Polynomial to_internal(const Polynomial& physical) const;
  /// Rewrites a polynomial in internal variables in terms of physical ones.
  Polynomial to_physical(const Polynomial& internal) const;
};

/// Controls: U = {u : w_j(u) >= 0}. Polynomials live on the control-only
/// layout (t, u_1..u_m) with zero modes and never mention t.
class ControlSet {
 public:
  ControlSet(int m, std::vector<Polynomial> constraints, std::optional<std::vector<Interval>> box = {});

  /// Box constraints (hi - u_i)(u_i - lo) >= 0, one per component.
  static ControlSet box(std::vector<Interval> box);

  int dimension() const { return m_; }
  const std::vector<Polynomial>& constraints() const { return constraints_; }
  const std::optional<std::vector<Interval>>& box_bounds() const { return box_; }
  static VarLayout layout(int m) { return {0, m}; }

 private:
  int m_;
  std::vector<Polynomial> constraints_;
  std::optional<std::vector<Interval>> box_;
};

/// Places a polynomial in (t, u) onto the joint layout with N modes.
Polynomial embed_time_control(const Polynomial& p, VarLayout joint);

enum class MeasureTag { Occupation, Terminal };

/// Truncated pseudo-moment sequence of one measure, indexed by the graded
/// lexicographic basis of the slots it ranges over. Values are stored in the
/// internal (scaled) coordinates described by `scaling`.
struct MomentVector {
  MeasureTag tag{MeasureTag::Occupation};
  std::shared_ptr<const MonomialBasis> basis;
  VariableScaling scaling;
  Eigen::VectorXd values;

  int degree() const { return basis->max_degree(); }
  const std::vector<int>& slots() const { return basis->slots(); }
  int nvars() const { return basis->nvars(); }
  double mass() const { return values(0); }
  double at(const MultiIndex& alpha) const;

  /// Linear functional l_y(theta) = sum_gamma theta_gamma y_gamma.
  double apply(const Polynomial& theta) const;

  /// Moments of the same measure in physical coordinates.
  MomentVector to_physical() const;
};

/// Moments of the marginal on `subset` (a subset of y's slots).
MomentVector marginal(const MomentVector& y, std::vector<int> subset);

struct BlockTerm {
  int row;
  int col;   // row <= col
  int var;   // -1 for the constant part
  double coef;
};

/// Moment or localizing matrix M_order(theta y) of one measure restricted to
/// a set of slots (all of them, or one marginal).
struct MomentMatrixSpec {
  std::string label;
  MeasureTag measure{MeasureTag::Occupation};
  Polynomial shift_poly;
  int order{0};
  std::vector<int> variable_subset;
};

struct AffineBlock {
  MomentMatrixSpec spec;
  int size{0};
  std::vector<BlockTerm> terms;

  Eigen::MatrixXd realize(const Eigen::VectorXd& v) const;
};

enum class TestDegree { R, TwoR };

struct RelaxationOptions {
  TestDegree test_degree{TestDegree::TwoR};
  // Physical windows mapped onto [-1, 1] in internal coordinates, indexed by
  // slot (t, z_1..z_N). Unset entries use [0, T] and the state bounds. The
  // relaxation value does not depend on them; they only affect conditioning.
  std::vector<std::optional<Interval>> scaling_windows;
};

/// Order-r moment relaxation: blocks(v) PSD, E v = f, minimize c.v + offset,
/// with v = (y, y^T) stacked.
struct SDPProblem {
  int modes{0};
  int controls{0};
  int order{0};
  int test_degree{0};
  Horizon horizon;
  VarLayout layout;
  VariableScaling scaling;
  AffineField internal_field;
  // Terminal intervals of the modes in internal coordinates.
  std::vector<Interval> terminal_bounds_internal;

  std::shared_ptr<const MonomialBasis> occupation_basis;
  std::shared_ptr<const MonomialBasis> terminal_basis;
  int occupation_offset{0};
  int terminal_offset{0};

  std::vector<AffineBlock> blocks;
  std::vector<MultiIndex> test_monomials;
  Eigen::SparseMatrix<double, Eigen::RowMajor> equalities;
  Eigen::VectorXd rhs;
  Eigen::VectorXd objective;
  double objective_offset{0.0};

  int num_variables() const { return static_cast<int>(objective.size()); }
  int state_monomial_count() const;
  std::vector<int> block_sizes() const;

  MomentVector occupation(const Eigen::VectorXd& v) const;
  MomentVector terminal(const Eigen::VectorXd& v) const;
  double objective_value(const Eigen::VectorXd& v) const { return objective.dot(v) + objective_offset; }
  Eigen::VectorXd equality_residual(const Eigen::VectorXd& v) const { return equalities * v - rhs; }
};

/// Scaling windows sized to an a priori bound on each state's reachable range
/// (log-norm estimate per mode block, box controls only), clipped to the state
/// bounds. A positive `time_extent` scales t to [0, time_extent]. Modes whose
/// range cannot be bounded keep their default window.
std::vector<std::optional<Interval>> conditioning_windows(const ModalSystem& sys, const ControlSet& controls,
                                                          double time_extent = 0.0);

/// r_min = max(1, ceil(deg w_j / 2), ceil(deg h / 2)).
int minimal_order(const ControlSet& controls, const Polynomial& cost);

/// Fixed final time T. `cost` is h(t, u) on the control layout.
SDPProblem build_fixed_time(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                            const RelaxationOptions& options = {});

/// Free final time in [0, T0]; the terminal measure also carries t.
SDPProblem build_free_time(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                           const RelaxationOptions& options = {});

/// Dispatches on sys.horizon().
SDPProblem build_relaxation(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                            const RelaxationOptions& options = {});

}  // namespace rieszocp
