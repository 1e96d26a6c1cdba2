#include "rieszocp/liouville.h"

#include <stdexcept>

namespace rieszocp {

AffineField AffineField::zero(VarLayout layout) {
  AffineField f;
  f.layout = layout;
  f.drift = Eigen::MatrixXd::Zero(layout.modes, layout.modes);
  f.input = Eigen::MatrixXd::Zero(layout.modes, layout.controls);
  f.offset = Eigen::VectorXd::Zero(layout.modes);
  return f;
}

void AffineField::validate() const {
  const int n = layout.modes, m = layout.controls;
  if (drift.rows() != n || drift.cols() != n || input.rows() != n || input.cols() != m ||
      offset.size() != n) {
    throw std::invalid_argument("AffineField: dimensions do not match the variable layout");
  }
}

Polynomial liouville_apply(const Polynomial& g, const AffineField& field) {
  field.validate();
  const VarLayout& L = g.layout();
  if (!(L == field.layout)) throw std::invalid_argument("liouville_apply: layout mismatch");
  for (int i = 0; i < L.controls; ++i) {
    for (const auto& [alpha, c] : g.terms()) {
      if (alpha[L.control(i)] != 0) {
        throw std::invalid_argument("liouville_apply: test function depends on control u" +
                                    std::to_string(i + 1));
      }
    }
  }

  Polynomial result = g.derivative(VarLayout::time()) * field.time_rate;
  for (int k = 0; k < L.modes; ++k) {
    const Polynomial dg = g.derivative(L.mode(k));
    if (dg.is_zero()) continue;
    std::vector<std::pair<MultiIndex, double>> f_terms;
    for (int j = 0; j < L.modes; ++j) {
      f_terms.emplace_back(MultiIndex::unit(L.size(), L.mode(j)), field.drift(k, j));
    }
    for (int i = 0; i < L.controls; ++i) {
      f_terms.emplace_back(MultiIndex::unit(L.size(), L.control(i)), field.input(k, i));
    }
    f_terms.emplace_back(MultiIndex(L.size()), field.offset(k));
    result = result + Polynomial(L, std::move(f_terms)) * dg;
  }
  return result;
}

}  // namespace rieszocp
