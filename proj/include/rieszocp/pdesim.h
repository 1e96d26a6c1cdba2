#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rieszocp/extract.h"
#include "rieszocp/spectral.h"

namespace rieszocp {

/// Nodal values on a uniform grid of [0, 1] at nt + 1 equally spaced times.
struct Field {
  Eigen::VectorXd grid;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> snapshots;
  double dt{0.0};
  int nt{0};

  const Eigen::VectorXd& terminal() const { return snapshots.back(); }
  /// Rows t,x,value for every snapshot and node.
  std::string to_csv() const;
};

struct SimReport {
  double terminal_l2{0.0};
  std::vector<double> energy_trace;   // wave only
  std::vector<double> control_trace;  // u_1 at every time level
  int clip_count{0};                  // time levels where u left [-1, 1]
};

struct SimResult {
  Field field;
  SimReport report;
};

/// Trapezoid-rule L2 norm of nodal values on a uniform grid.
double l2_norm(const Eigen::VectorXd& values);

/// Trapezoid-rule projection onto sqrt(2) sin(k pi x).
double sine_coefficient(const Eigen::VectorXd& values, int k);

enum class HeatBoundary { Neumann, Dirichlet };

struct HeatOptions {
  int nx{30};
  int nt{30};
  HeatBoundary boundary{HeatBoundary::Neumann};
  // Defaults to cos(pi x).
  std::function<double(double)> initial;
};

/// dh/dt = d2h/dx2 + b(x) u(t) with b = (1/eps) 1 on the clipped actuator
/// support, sampled at the nodes. Second-order central differences (ghost
/// nodes for the Neumann closure) and Crank-Nicolson in time. u is clipped
/// into [-1, 1].
SimResult simulate_heat(const ControlPolynomial& u, double epsilon, double x0, double T,
                        const HeatOptions& options = {});

struct WaveOptions {
  int nx{64};
  double cfl{0.5};
  // Default to sin(2 pi x) and sin^2(2 pi x).
  std::function<double(double)> initial_displacement;
  std::function<double(double)> initial_velocity;
};

/// d2w/dt2 = d2w/dx2 + b(x) u(t), w = 0 at both ends, as a first-order
/// system integrated with the implicit midpoint rule at dt <= cfl dx.
/// energy_trace holds the discrete energy (1/2)|v|^2 + (1/2)|w_x|^2.
SimResult simulate_wave(const ControlPolynomial& u, double epsilon, double x0, double T,
                        const WaveOptions& options = {});

struct ModalTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  int clip_count{0};
};

/// Exact exponential step of dz/dt = drift z + input u(t) per interval, with
/// the forcing integral evaluated by 8-point Gauss-Legendre quadrature. The
/// last step is shortened to land on T. Controls are clipped into [-1, 1].
ModalTrajectory simulate_modes(const ModalSystem& sys, const ControlPolynomial& u, double T, double dt);

}  // namespace rieszocp
