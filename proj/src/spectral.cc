#include "rieszocp/spectral.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "rieszocp/quadrature.h"

namespace rieszocp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_actuator(double epsilon, double x0) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (!(x0 > 0.0 && x0 < 1.0)) {
    throw std::invalid_argument("x0 must lie in (0, 1), got " + std::to_string(x0));
  }
}

bool is_real(Complex z) { return std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)); }

}  // namespace

Interval actuator_support(double epsilon, double x0) {
  return {std::max(0.0, x0 - epsilon), std::min(1.0, x0 + epsilon)};
}

double heat_actuator_projection(int k, double epsilon, double x0) {
  const Interval s = actuator_support(epsilon, x0);
  return std::sqrt(2.0) / (epsilon * k * kPi) * (std::cos(k * kPi * s.lo) - std::cos(k * kPi * s.hi));
}

SpectralModel heat_model(double epsilon, double x0) {
  check_actuator(epsilon, x0);
  SpectralModel m;
  m.descriptor = {"heat", epsilon, x0};
  m.controls = 1;
  m.eigenvalue = [](int k) {
    if (k < 1) throw std::out_of_range("heat model: index must be >= 1");
    return Complex(-static_cast<double>(k) * k * kPi * kPi, 0.0);
  };
  m.input_projection = [epsilon, x0](int k) {
    if (k < 1) throw std::out_of_range("heat model: index must be >= 1");
    return std::vector<Complex>{heat_actuator_projection(k, epsilon, x0)};
  };
  // sqrt(2) int_0^1 cos(pi x) sin(k pi x) dx
  m.initial_projection = [](int k) {
    if (k < 1) throw std::out_of_range("heat model: index must be >= 1");
    const auto part = [](int j) {
      if (j == 0) return 0.0;
      return (1.0 - std::cos(j * kPi)) / (j * kPi);
    };
    return Complex(std::sqrt(2.0) * 0.5 * (part(k + 1) + part(k - 1)), 0.0);
  };
  m.truncation_indices = [](int n) {
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k + 1;
    return idx;
  };
  return m;
}

namespace {

// Data shared by the wave model closures: projections onto the retained
// basis, already multiplied by the inverse Gram matrix.
struct WaveData {
  int max_index{0};
  std::vector<int> order;  // 1, -1, 2, -2, ...
  Eigen::VectorXcd initial;
  Eigen::VectorXcd input;

  int position(int k) const {
    if (k == 0 || std::abs(k) > max_index) {
      throw std::out_of_range("wave model: index " + std::to_string(k) + " outside +-" +
                              std::to_string(max_index));
    }
    return 2 * (std::abs(k) - 1) + (k < 0 ? 1 : 0);
  }
};

// <f, Phi_l> in the energy inner product, f given through w' and v.
Complex energy_projection(const std::function<double(double)>& dw, const std::function<double(double)>& v,
                          int l, std::span<const double> breaks) {
  // Phi_l = (sin(l pi x)/(i l pi), sin(l pi x)) for l > 0; its w' is
  // -i cos(l pi x).
  const double re = integrate([&](double x) { return v(x) * std::sin(l * kPi * x); }, 0.0, 1.0, 1e-11, breaks);
  const double im = integrate([&](double x) { return dw(x) * std::cos(l * kPi * x); }, 0.0, 1.0, 1e-11, breaks);
  return {re, im};
}

}  // namespace

SpectralModel wave_model(double epsilon, double x0, int max_index) {
  check_actuator(epsilon, x0);
  if (max_index < 1) throw std::invalid_argument("wave model: max_index must be >= 1");
  auto data = std::make_shared<WaveData>();
  data->max_index = max_index;
  for (int k = 1; k <= max_index; ++k) {
    data->order.push_back(k);
    data->order.push_back(-k);
  }
  const int n = static_cast<int>(data->order.size());

  const Interval supp = actuator_support(epsilon, x0);
  const double breaks[] = {supp.lo, supp.hi};
  const auto b_fn = [supp, epsilon](double x) { return supp.contains(x) ? 1.0 / epsilon : 0.0; };
  const auto zero_fn = [](double) { return 0.0; };
  const auto w0_prime = [](double x) { return 2.0 * kPi * std::cos(2.0 * kPi * x); };
  const auto v0 = [](double x) {
    const double s = std::sin(2.0 * kPi * x);
    return s * s;
  };

  // The basis {Phi_k, Phi_-k = conj(Phi_k)} is orthonormal in the energy
  // product (<Phi_k, Phi_l> = int cos((k - l) pi x) dx), so the biorthogonal
  // vectors are the Phi_k themselves and z_k = <f, Phi_k>. Real data then
  // gives z_-k = conj(z_k).
  data->initial.resize(n);
  data->input.resize(n);
  for (int k = 1; k <= max_index; ++k) {
    const Complex init = energy_projection(w0_prime, v0, k, {});
    const Complex input = energy_projection(zero_fn, b_fn, k, breaks);
    data->initial(data->position(k)) = init;
    data->initial(data->position(-k)) = std::conj(init);
    data->input(data->position(k)) = input;
    data->input(data->position(-k)) = std::conj(input);
  }

  SpectralModel m;
  m.descriptor = {"wave", epsilon, x0};
  m.controls = 1;
  m.eigenvalue = [data](int k) {
    data->position(k);
    return Complex(0.0, k * kPi);
  };
  m.input_projection = [data](int k) { return std::vector<Complex>{data->input(data->position(k))}; };
  m.initial_projection = [data](int k) { return data->initial(data->position(k)); };
  m.truncation_indices = [data](int count) {
    if (count > data->max_index) {
      throw std::out_of_range("wave model: truncation exceeds the biorthogonalized basis");
    }
    return std::vector<int>(data->order.begin(), data->order.begin() + 2 * count);
  };
  return m;
}

SpectralModel custom_model(std::string name, std::vector<CustomMode> modes) {
  if (modes.empty()) throw std::invalid_argument("custom model: no modes");
  const int m_ctrl = static_cast<int>(modes.front().input.size());
  if (m_ctrl < 1) throw std::invalid_argument("custom model: at least one control is required");
  for (const auto& md : modes) {
    if (static_cast<int>(md.input.size()) != m_ctrl) {
      throw std::invalid_argument("custom model: inconsistent control dimension");
    }
  }
  auto table = std::make_shared<std::vector<CustomMode>>(std::move(modes));
  const auto at = [table](int k) -> const CustomMode& {
    if (k < 1 || k > static_cast<int>(table->size())) throw std::out_of_range("custom model: index out of range");
    return (*table)[k - 1];
  };
  SpectralModel m;
  m.descriptor = {std::move(name), 0.0, 0.0};
  m.controls = m_ctrl;
  m.eigenvalue = [at](int k) { return at(k).eigenvalue; };
  m.input_projection = [at](int k) { return at(k).input; };
  m.initial_projection = [at](int k) { return at(k).initial; };
  m.truncation_indices = [table](int n) {
    if (n > static_cast<int>(table->size())) throw std::out_of_range("custom model: not enough modes");
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k + 1;
    return idx;
  };
  return m;
}

ModalSystem::ModalSystem(ModelDescriptor descriptor, std::vector<ModeBlock> blocks, Eigen::MatrixXd drift,
                         Eigen::MatrixXd input, Eigen::VectorXd z0, std::vector<Interval> state_bounds,
                         std::vector<Interval> terminal_bounds, Horizon horizon)
    : descriptor_(std::move(descriptor)),
      blocks_(std::move(blocks)),
      drift_(std::move(drift)),
      input_(std::move(input)),
      z0_(std::move(z0)),
      state_bounds_(std::move(state_bounds)),
      terminal_bounds_(std::move(terminal_bounds)),
      horizon_(horizon) {
  const int n = dimension();
  if (n < 1) throw std::invalid_argument("ModalSystem: empty state");
  if (drift_.rows() != n || drift_.cols() != n || input_.rows() != n) {
    throw std::invalid_argument("ModalSystem: inconsistent dimensions");
  }
  if (static_cast<int>(state_bounds_.size()) != n || static_cast<int>(terminal_bounds_.size()) != n) {
    throw std::invalid_argument("ModalSystem: one state and one terminal interval per variable");
  }
  if (!(horizon_.T > 0.0) || !std::isfinite(horizon_.T)) throw std::invalid_argument("ModalSystem: horizon must be positive");
  for (int k = 0; k < n; ++k) {
    const Interval& s = state_bounds_[k];
    const Interval& t = terminal_bounds_[k];
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi) || !std::isfinite(t.lo) || !std::isfinite(t.hi)) {
      throw std::invalid_argument("ModalSystem: unbounded interval for variable " + std::to_string(k + 1));
    }
    if (s.lo > s.hi || t.lo > t.hi) {
      throw std::invalid_argument("ModalSystem: empty interval for variable " + std::to_string(k + 1));
    }
    if (!s.contains(z0_(k), 1e-12 * std::max(1.0, std::abs(z0_(k))))) {
      throw std::invalid_argument("infeasible initial condition: z0[" + std::to_string(k + 1) + "] = " +
                                  std::to_string(z0_(k)) + " outside the state bounds");
    }
  }
}

ModalSystem ModalSystem::with_horizon(Horizon h) const {
  ModalSystem s(*this);
  if (!(h.T > 0.0)) throw std::invalid_argument("ModalSystem: horizon must be positive");
  s.horizon_ = h;
  return s;
}

ModalSystem ModalSystem::with_bounds(std::vector<Interval> state, std::vector<Interval> terminal) const {
  return ModalSystem(descriptor_, blocks_, drift_, input_, z0_, std::move(state), std::move(terminal), horizon_);
}

AffineField ModalSystem::field() const {
  AffineField f;
  f.layout = layout();
  f.time_rate = 1.0;
  f.drift = drift_;
  f.input = input_;
  f.offset = Eigen::VectorXd::Zero(dimension());
  return f;
}

ModalSystem truncate_and_realify(const SpectralModel& model, int n_modes, const BoundsConfig& bounds,
                                 Horizon horizon) {
  if (n_modes < 1) throw std::invalid_argument("truncate_and_realify: N_modes must be >= 1");
  const int m = model.controls;
  std::vector<ModeBlock> blocks;
  std::vector<double> z0;
  std::vector<std::vector<double>> input_rows;
  std::vector<Complex> lambdas;
  for (int k : model.truncation_indices(n_modes)) {
    const Complex lambda = model.eigenvalue(k);
    const std::vector<Complex> b = model.input_projection(k);
    const Complex init = model.initial_projection(k);
    if (static_cast<int>(b.size()) != m) throw std::invalid_argument("input projection has wrong length");
    ModeBlock blk{k, static_cast<int>(z0.size()), is_real(lambda) ? 1 : 2, lambda};
    if (blk.size == 1) {
      if (!is_real(init)) throw std::invalid_argument("real mode with complex initial value");
      z0.push_back(init.real());
      std::vector<double> row(m);
      for (int i = 0; i < m; ++i) {
        if (!is_real(b[i])) throw std::invalid_argument("real mode with complex input projection");
        row[i] = b[i].real();
      }
      input_rows.push_back(row);
    } else {
      z0.push_back(init.real());
      z0.push_back(init.imag());
      std::vector<double> re(m), im(m);
      for (int i = 0; i < m; ++i) {
        re[i] = b[i].real();
        im[i] = b[i].imag();
      }
      input_rows.push_back(re);
      input_rows.push_back(im);
    }
    blocks.push_back(blk);
  }

  const int n = static_cast<int>(z0.size());
  Eigen::MatrixXd drift = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd input(n, m);
  Eigen::VectorXd z0v(n);
  for (int k = 0; k < n; ++k) {
    z0v(k) = z0[k];
    for (int i = 0; i < m; ++i) input(k, i) = input_rows[k][i];
  }
  for (const ModeBlock& blk : blocks) {
    const int f = blk.first;
    if (blk.size == 1) {
      drift(f, f) = blk.eigenvalue.real();
    } else {
      drift(f, f) = blk.eigenvalue.real();
      drift(f, f + 1) = -blk.eigenvalue.imag();
      drift(f + 1, f) = blk.eigenvalue.imag();
      drift(f + 1, f + 1) = blk.eigenvalue.real();
    }
  }

  double zmax = z0v.cwiseAbs().maxCoeff();
  if (zmax == 0.0) zmax = 1.0;
  const double r = bounds.state_scale * zmax;
  std::vector<Interval> state(n, Interval{-r, r});
  std::vector<Interval> terminal(n, Interval{-bounds.terminal_slack, bounds.terminal_slack});
  const auto apply = [n](std::vector<Interval>& target, const std::vector<std::optional<Interval>>& over,
                         const char* what) {
    if (over.size() > static_cast<std::size_t>(n)) {
      throw std::invalid_argument(std::string(what) + " overrides exceed the state dimension");
    }
    for (std::size_t k = 0; k < over.size(); ++k) {
      if (over[k]) target[k] = *over[k];
    }
  };
  apply(state, bounds.state_overrides, "state bound");
  apply(terminal, bounds.terminal_overrides, "terminal bound");

  return ModalSystem(model.descriptor, std::move(blocks), std::move(drift), std::move(input), std::move(z0v),
                     std::move(state), std::move(terminal), horizon);
}

Polynomial liouville_apply(const Polynomial& g, const ModalSystem& sys) {
  return liouville_apply(g, sys.field());
}

}  // namespace rieszocp
