#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rieszocp/multi_index.h"

namespace rieszocp {

/// Sparse real polynomial in the joint variables (t, z_1..z_N, u_1..u_m).
/// Immutable value: every operation returns a new polynomial and zero
/// coefficients are never stored.
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, double, GlexLess>;

  Polynomial() = default;
  explicit Polynomial(VarLayout layout) : layout_(layout) {}
  Polynomial(VarLayout layout, double constant);
  Polynomial(VarLayout layout, std::vector<std::pair<MultiIndex, double>> terms);

  static Polynomial monomial(VarLayout layout, const MultiIndex& alpha, double coef = 1.0);
  static Polynomial variable(VarLayout layout, int slot);

  const VarLayout& layout() const { return layout_; }
  int nvars() const { return layout_.size(); }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Degree of the zero polynomial is -1.
  int degree() const;
  double coefficient(const MultiIndex& alpha) const;

  // True if no term mentions a slot outside `slots`.
  bool supported_on(std::span<const int> slots) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }
  friend Polynomial operator*(double s, const Polynomial& p) { return p * s; }

  Polynomial derivative(int slot) const;

  /// Substitutes x_slot -> scale * x_slot + shift.
  Polynomial affine_substitute(int slot, double scale, double shift) const;

  /// Fixes x_slot to a value; the slot remains in the layout with exponent 0.
  Polynomial evaluate_slot(int slot, double value) const;

  /// Largest coefficient difference against `other`.
  double max_abs_difference(const Polynomial& other) const;

  std::string str() const;

 private:
  void check_same_layout(const Polynomial& other) const;
  void add_term(const MultiIndex& alpha, double coef);

  VarLayout layout_{};
  Terms terms_;
};

/// Evaluates p at a point of length 1+N+m using per-variable power tables.
double poly_eval(const Polynomial& p, std::span<const double> point);

}  // namespace rieszocp
