#include "rieszocp/pdesim.h"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace rieszocp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Interval kAdmissible{-1.0, 1.0};

void check_common(const ControlPolynomial& u, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("simulation horizon T must be positive");
  if (u.components() != 1) throw std::invalid_argument("the PDE models have exactly one control");
}

Eigen::VectorXd uniform_grid(int nx) {
  if (nx < 3) throw std::invalid_argument("the grid needs at least 3 nodes");
  return Eigen::VectorXd::LinSpaced(nx, 0.0, 1.0);
}

// b(x) = (1/eps) on the clipped support, sampled at the nodes.
Eigen::VectorXd actuator(const Eigen::VectorXd& x, double epsilon, double x0) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("actuator half-width epsilon must be positive");
  const Interval s = actuator_support(epsilon, x0);
  Eigen::VectorXd b(x.size());
  for (int i = 0; i < x.size(); ++i) b(i) = s.contains(x(i), 1e-14) ? 1.0 / epsilon : 0.0;
  return b;
}

// Thomas algorithm for a tridiagonal system with constant bands, except for
// per-row overrides of the super/sub diagonals at the ends.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& sub, const Eigen::VectorXd& diag, const Eigen::VectorXd& sup,
                                  Eigen::VectorXd rhs) {
  const int n = static_cast<int>(diag.size());
  Eigen::VectorXd c(n);
  double d = diag(0);
  c(0) = sup(0) / d;
  rhs(0) /= d;
  for (int i = 1; i < n; ++i) {
    d = diag(i) - sub(i) * c(i - 1);
    c(i) = i + 1 < n ? sup(i) / d : 0.0;
    rhs(i) = (rhs(i) - sub(i) * rhs(i - 1)) / d;
  }
  for (int i = n - 2; i >= 0; --i) rhs(i) -= c(i) * rhs(i + 1);
  return rhs;
}

struct Tridiagonal {
  Eigen::VectorXd sub, diag, sup;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const {
    const int n = static_cast<int>(v.size());
    Eigen::VectorXd out = diag.cwiseProduct(v);
    for (int i = 0; i < n; ++i) {
      if (i > 0) out(i) += sub(i) * v(i - 1);
      if (i + 1 < n) out(i) += sup(i) * v(i + 1);
    }
    return out;
  }
  // identity + alpha * this
  Tridiagonal shifted(double alpha) const {
    return {alpha * sub, Eigen::VectorXd::Ones(diag.size()) + alpha * diag, alpha * sup};
  }
};

double control_at(const ControlPolynomial& u, double t, SimReport& report) {
  bool clipped = false;
  const double v = u.eval_clipped(0, t, kAdmissible, &clipped);
  if (clipped) ++report.clip_count;
  return v;
}

}  // namespace

std::string Field::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(10) << "t,x,value\n";
  for (std::size_t n = 0; n < snapshots.size(); ++n) {
    for (int i = 0; i < grid.size(); ++i) os << times[n] << ',' << grid(i) << ',' << snapshots[n](i) << '\n';
  }
  return os.str();
}

double l2_norm(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  const double h = 1.0 / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (i == 0 || i == n - 1 ? 0.5 : 1.0) * values(i) * values(i);
  return std::sqrt(h * s);
}

double sine_coefficient(const Eigen::VectorXd& values, int k) {
  const int n = static_cast<int>(values.size());
  const double h = 1.0 / (n - 1);
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = i == 0 || i == n - 1 ? 0.5 : 1.0;
    s += w * values(i) * std::sqrt(2.0) * std::sin(k * kPi * i * h);
  }
  return h * s;
}

SimResult simulate_heat(const ControlPolynomial& u, double epsilon, double x0, double T, const HeatOptions& opt) {
  check_common(u, T);
  if (opt.nt < 1) throw std::invalid_argument("heat simulation needs nt >= 1");
  const Eigen::VectorXd x = uniform_grid(opt.nx);
  const int nx = opt.nx;
  const double dx = 1.0 / (nx - 1);
  const double dt = T / opt.nt;
  const Eigen::VectorXd b = actuator(x, epsilon, x0);
  const auto initial = opt.initial ? opt.initial : [](double s) { return std::cos(kPi * s); };

  // Discrete Laplacian on the unknown nodes.
  const bool neumann = opt.boundary == HeatBoundary::Neumann;
  const int first = neumann ? 0 : 1;
  const int n = neumann ? nx : nx - 2;
  const double s = 1.0 / (dx * dx);
  Tridiagonal L{Eigen::VectorXd::Constant(n, s), Eigen::VectorXd::Constant(n, -2.0 * s),
                Eigen::VectorXd::Constant(n, s)};
  if (neumann) {
    // Ghost nodes h_{-1} = h_1 and h_{n} = h_{n-2}.
    L.sup(0) = 2.0 * s;
    L.sub(n - 1) = 2.0 * s;
  }
  const Tridiagonal lhs = L.shifted(-0.5 * dt);
  const Tridiagonal rhs_op = L.shifted(0.5 * dt);
  const Eigen::VectorXd bi = b.segment(first, n);

  SimResult res;
  Field& f = res.field;
  f.grid = x;
  f.dt = dt;
  f.nt = opt.nt;
  Eigen::VectorXd h(nx);
  for (int i = 0; i < nx; ++i) h(i) = initial(x(i));
  if (!neumann) h(0) = h(nx - 1) = 0.0;
  f.times.push_back(0.0);
  f.snapshots.push_back(h);
  double u_prev = control_at(u, 0.0, res.report);
  res.report.control_trace.push_back(u_prev);
  Eigen::VectorXd v = h.segment(first, n);
  for (int k = 1; k <= opt.nt; ++k) {
    const double t = k * dt;
    const double u_next = control_at(u, t, res.report);
    const Eigen::VectorXd r = rhs_op.apply(v) + (0.5 * dt * (u_prev + u_next)) * bi;
    v = solve_tridiagonal(lhs.sub, lhs.diag, lhs.sup, r);
    h.segment(first, n) = v;
    f.times.push_back(t);
    f.snapshots.push_back(h);
    res.report.control_trace.push_back(u_next);
    u_prev = u_next;
  }
  res.report.terminal_l2 = l2_norm(f.terminal());
  return res;
}

SimResult simulate_wave(const ControlPolynomial& u, double epsilon, double x0, double T, const WaveOptions& opt) {
  check_common(u, T);
  if (!(opt.cfl > 0.0 && opt.cfl <= 0.9)) throw std::invalid_argument("wave CFL number must lie in (0, 0.9]");
  const Eigen::VectorXd x = uniform_grid(opt.nx);
  const int nx = opt.nx;
  const double dx = 1.0 / (nx - 1);
  const int nt = static_cast<int>(std::ceil(T / (opt.cfl * dx) - 1e-12));
  const double dt = T / nt;
  const Eigen::VectorXd b = actuator(x, epsilon, x0);
  const auto w0 = opt.initial_displacement ? opt.initial_displacement
                                           : [](double s) { return std::sin(2.0 * kPi * s); };
  const auto v0 = opt.initial_velocity ? opt.initial_velocity : [](double s) {
    const double q = std::sin(2.0 * kPi * s);
    return q * q;
  };

  // Interior unknowns; the Dirichlet ends stay at zero.
  const int n = nx - 2;
  const double s = 1.0 / (dx * dx);
  const Tridiagonal L{Eigen::VectorXd::Constant(n, s), Eigen::VectorXd::Constant(n, -2.0 * s),
                      Eigen::VectorXd::Constant(n, s)};
  const Tridiagonal lhs = L.shifted(-0.25 * dt * dt);
  const Eigen::VectorXd bi = b.segment(1, n);

  Eigen::VectorXd w(n), v(n);
  for (int i = 0; i < n; ++i) {
    w(i) = w0(x(i + 1));
    v(i) = v0(x(i + 1));
  }
  const auto energy = [&](const Eigen::VectorXd& wi, const Eigen::VectorXd& vi) {
    // (1/2) dx |v|^2 - (1/2) dx w^T L w, i.e. the sum of squared differences.
    return 0.5 * dx * vi.squaredNorm() - 0.5 * dx * wi.dot(L.apply(wi));
  };
  const auto full = [&](const Eigen::VectorXd& wi) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nx);
    out.segment(1, n) = wi;
    return out;
  };

  SimResult res;
  Field& f = res.field;
  f.grid = x;
  f.dt = dt;
  f.nt = nt;
  f.times.push_back(0.0);
  f.snapshots.push_back(full(w));
  res.report.energy_trace.push_back(energy(w, v));
  res.report.control_trace.push_back(control_at(u, 0.0, res.report));
  for (int k = 1; k <= nt; ++k) {
    const double t = k * dt;
    SimReport scratch;
    const double um = control_at(u, t - 0.5 * dt, scratch);
    // Implicit midpoint: w+ = w + dt/2 (v + v+), v+ = v + dt/2 L (w + w+) + dt b u.
    const Eigen::VectorXd Lw = L.apply(w);
    const Eigen::VectorXd r = v + dt * Lw + 0.25 * dt * dt * L.apply(v) + (dt * um) * bi;
    const Eigen::VectorXd v_next = solve_tridiagonal(lhs.sub, lhs.diag, lhs.sup, r);
    w += 0.5 * dt * (v + v_next);
    v = v_next;
    f.times.push_back(t);
    f.snapshots.push_back(full(w));
    res.report.energy_trace.push_back(energy(w, v));
    res.report.control_trace.push_back(control_at(u, t, res.report));
  }
  res.report.terminal_l2 = l2_norm(f.terminal());
  return res;
}

ModalTrajectory simulate_modes(const ModalSystem& sys, const ControlPolynomial& u, double T, double dt) {
  if (!(T >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("simulate_modes needs T >= 0 and dt > 0");
  if (u.components() != sys.controls()) throw std::invalid_argument("control dimension does not match the system");
  const Eigen::MatrixXd& A = sys.drift();
  const Eigen::MatrixXd& B = sys.input();
  const int m = sys.controls();
  using Rule = boost::math::quadrature::gauss<double, 8>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();

  ModalTrajectory out;
  Eigen::VectorXd z = sys.z0();
  out.times.push_back(0.0);
  out.states.push_back(z);
  const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  Eigen::VectorXd uval(m);
  const auto eval_u = [&](double t) {
    for (int i = 0; i < m; ++i) {
      bool clipped = false;
      uval(i) = u.eval_clipped(i, t, kAdmissible, &clipped);
      if (clipped) ++out.clip_count;
    }
    return uval;
  };
  for (int k = 0; k < steps; ++k) {
    const double t0 = k * dt;
    const double h = std::min(dt, T - t0);
    if (h <= 0.0) break;
    const Eigen::MatrixXd E = (A * h).exp();
    // int_0^h e^{A (h - s)} B u(t0 + s) ds, nodes symmetric about h/2.
    Eigen::VectorXd forcing = Eigen::VectorXd::Zero(z.size());
    for (std::size_t q = 0; q < abscissa.size(); ++q) {
      for (double sign : {-1.0, 1.0}) {
        if (abscissa[q] == 0.0 && sign > 0.0) continue;
        const double s = 0.5 * h * (1.0 + sign * abscissa[q]);
        forcing += (0.5 * h * weights[q]) * ((A * (h - s)).exp() * (B * eval_u(t0 + s)));
      }
    }
    z = E * z + forcing;
    out.times.push_back(t0 + h);
    out.states.push_back(z);
  }
  return out;
}

}  // namespace rieszocp
