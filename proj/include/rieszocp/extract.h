#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rieszocp/relaxation.h"

namespace rieszocp {

/// Open-loop control u_i(t) = sum_k coefficients[i][k] t^k in physical time,
/// valid on [0, horizon].
struct ControlPolynomial {
  std::vector<Eigen::VectorXd> coefficients;  // one vector per control component
  double horizon{0.0};

  int components() const { return static_cast<int>(coefficients.size()); }
  int degree() const { return coefficients.empty() ? -1 : static_cast<int>(coefficients[0].size()) - 1; }

  /// Value of component i at t; clipped into [lo, hi] when `clip` is given.
  double eval(int i, double t) const;
  double eval_clipped(int i, double t, Interval clip, bool* clipped = nullptr) const;

  static ControlPolynomial constant(std::vector<double> values, double horizon);

  /// One CSV row per component: degree, c_0..c_d.
  std::string to_csv() const;
  /// Inverse of to_csv(). Throws std::invalid_argument on malformed rows.
  static ControlPolynomial from_csv(const std::string& text, double horizon);
};

/// Least-squares projection of the control onto degree-d polynomials in t
/// under the time marginal of the occupation measure:
///   (H + lambda I) c_i = g_i,  H_jk = l_y(t^{j+k}),  (g_i)_j = l_y(t^j u_i),
/// with lambda = 1e-8 trace(H)/(d+1) and d = floor(r/2), followed by three
/// refinement steps on H c_i = g_i that reuse the regularized factorization.
/// The moments may be in internal coordinates; the result is expressed in
/// physical time.
/// Throws std::runtime_error("degenerate occupation measure") when the mass
/// is below 1e-10.
ControlPolynomial extract_controller(const MomentVector& y, int r, int m, double horizon);

}  // namespace rieszocp
