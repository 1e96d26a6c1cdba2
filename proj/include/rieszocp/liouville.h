#pragma once

#include <Eigen/Dense>

#include "rieszocp/polynomial.h"

namespace rieszocp {

/// Affine controlled vector field  dz/dt = drift z + input u + offset,
/// with time advancing at `time_rate` (1 for physical time, 2/T after
/// rescaling t to [-1, 1]).
struct AffineField {
  VarLayout layout;
  double time_rate{1.0};
  Eigen::MatrixXd drift;   // N x N
  Eigen::MatrixXd input;   // N x m
  Eigen::VectorXd offset;  // N

  static AffineField zero(VarLayout layout);
  void validate() const;
};

/// Liouville generator applied to a test function g(t, z):
///   time_rate dg/dt + sum_k f_k(z, u) dg/dz_k.
/// Throws std::invalid_argument if g mentions a control variable.
Polynomial liouville_apply(const Polynomial& g, const AffineField& field);

}  // namespace rieszocp
