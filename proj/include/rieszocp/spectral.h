#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rieszocp/liouville.h"
#include "rieszocp/polynomial.h"

namespace rieszocp {

using Complex = std::complex<double>;

struct Interval {
  double lo{0.0};
  double hi{0.0};

  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Physical parameters of a one-dimensional model with a distributed
/// actuator b(x) = (1/epsilon) 1_[x0 - epsilon, x0 + epsilon](x) on [0, 1].
struct ModelDescriptor {
  std::string name;
  double epsilon{0.0};
  double x0{0.0};
};

/// A Riesz-spectral model given through its spectral data. Indices are the
/// model's own labelling (1, 2, ... for heat; +-1, +-2, ... for wave).
struct SpectralModel {
  ModelDescriptor descriptor;
  int controls{1};
  std::function<Complex(int)> eigenvalue;
  std::function<std::vector<Complex>(int)> input_projection;
  std::function<Complex(int)> initial_projection;
  // Indices retained by an n-mode truncation, in state order.
  std::function<std::vector<int>(int)> truncation_indices;
};

/// Heat equation with lambda_k = -k^2 pi^2, Phi_k = sqrt(2) sin(k pi x),
/// initial state cos(pi x). The actuator support is clipped to [0, 1].
SpectralModel heat_model(double epsilon, double x0);

/// Wave equation in the energy space H^1_0 x L^2 with lambda_k = i k pi,
/// Phi_k = (1/(i k pi)) (sin(k pi x), i k pi sin(k pi x)) for k > 0 and
/// Phi_-k = conj(Phi_k), initial data
/// w = sin(2 pi x), dw/dt = sin^2(2 pi x). Adjoint vectors come from
/// biorthogonality against {Phi_k : 0 < |k| <= max_index}; the basis is
/// orthonormal in the energy product, so the projections use it directly.
SpectralModel wave_model(double epsilon, double x0, int max_index = 8);

/// One mode of a tabulated spectrum.
struct CustomMode {
  Complex eigenvalue;
  std::vector<Complex> input;
  Complex initial;
};

SpectralModel custom_model(std::string name, std::vector<CustomMode> modes);

/// Closed-form actuator projection (1/eps) int sqrt(2) sin(k pi x) over the
/// clipped support.
double heat_actuator_projection(int k, double epsilon, double x0);

/// Clipped actuator support [max(0, x0-eps), min(1, x0+eps)].
Interval actuator_support(double epsilon, double x0);

struct Horizon {
  enum class Kind { Fixed, Free };
  Kind kind{Kind::Fixed};
  double T{1.0};  // final time for Fixed, upper bound T0 for Free

  static Horizon fixed(double T) { return {Kind::Fixed, T}; }
  static Horizon free(double T0) { return {Kind::Free, T0}; }
  bool is_free() const { return kind == Kind::Free; }
};

struct BoundsConfig {
  // Default state interval is [-c |z0|_inf, c |z0|_inf] for every variable.
  double state_scale{2.0};
  // Default terminal interval is [-slack, slack].
  double terminal_slack{0.0};
  std::vector<std::optional<Interval>> state_overrides;
  std::vector<std::optional<Interval>> terminal_overrides;
};

/// A real mode group: a scalar mode or a 2x2 rotation-scaling block.
struct ModeBlock {
  int spectral_index{0};
  int first{0};
  int size{1};
  Complex eigenvalue;
};

/// Finite real modal system  dz/dt = drift z + input u  after truncation and
/// realification.
class ModalSystem {
 public:
  ModalSystem(ModelDescriptor descriptor, std::vector<ModeBlock> blocks, Eigen::MatrixXd drift,
              Eigen::MatrixXd input, Eigen::VectorXd z0, std::vector<Interval> state_bounds,
              std::vector<Interval> terminal_bounds, Horizon horizon);

  int dimension() const { return static_cast<int>(z0_.size()); }
  int controls() const { return static_cast<int>(input_.cols()); }
  VarLayout layout() const { return {dimension(), controls()}; }

  const ModelDescriptor& descriptor() const { return descriptor_; }
  const std::vector<ModeBlock>& blocks() const { return blocks_; }
  const Eigen::MatrixXd& drift() const { return drift_; }
  const Eigen::MatrixXd& input() const { return input_; }
  const Eigen::VectorXd& z0() const { return z0_; }
  const std::vector<Interval>& state_bounds() const { return state_bounds_; }
  const std::vector<Interval>& terminal_bounds() const { return terminal_bounds_; }
  const Horizon& horizon() const { return horizon_; }

  ModalSystem with_horizon(Horizon h) const;
  ModalSystem with_bounds(std::vector<Interval> state, std::vector<Interval> terminal) const;

  /// dz/dt = drift z + input u in physical units.
  AffineField field() const;

 private:
  ModelDescriptor descriptor_;
  std::vector<ModeBlock> blocks_;
  Eigen::MatrixXd drift_;
  Eigen::MatrixXd input_;
  Eigen::VectorXd z0_;
  std::vector<Interval> state_bounds_;
  std::vector<Interval> terminal_bounds_;
  Horizon horizon_;
};

/// Keeps the first n_modes spectral indices, maps real eigenvalues to scalar
/// modes and complex ones to 2x2 blocks on (Re z, Im z).
/// Throws std::invalid_argument("infeasible initial condition") when z0 is
/// outside the state bounds.
ModalSystem truncate_and_realify(const SpectralModel& model, int n_modes, const BoundsConfig& bounds,
                                 Horizon horizon);

/// Liouville generator of the modal dynamics (physical units).
Polynomial liouville_apply(const Polynomial& g, const ModalSystem& sys);

}  // namespace rieszocp
