#pragma once

#include <functional>
#include <span>

namespace rieszocp {

/// Adaptive Gauss-Kronrod quadrature of f over [a, b]. `breakpoints` inside
/// (a, b) split the interval at known kinks or jumps of the integrand.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, std::span<const double> breakpoints = {});

}  // namespace rieszocp
