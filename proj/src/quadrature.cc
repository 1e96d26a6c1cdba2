#include "rieszocp/quadrature.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rieszocp {

namespace {

double integrate_piece(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0, l1 = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14, &error, &l1);
  if (error > abs_tol && error > 1e-14 * l1) {
    throw std::runtime_error("integrate: requested tolerance not reached on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
  }
  return value;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 std::span<const double> breakpoints) {
  if (!(a <= b)) throw std::invalid_argument("integrate: empty interval");
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  const double piece_tol = abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) total += integrate_piece(f, cuts[i], cuts[i + 1], piece_tol);
  }
  return total;
}

}  // namespace rieszocp
