#include "rieszocp/spectral.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rieszocp/quadrature.h"

namespace rieszocp {
namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

TEST(HeatModelTest, Eigenvalues) {
  const SpectralModel m = heat_model(0.4, 0.27);
  EXPECT_NEAR(m.eigenvalue(3).real(), -88.82643960980423, 1e-12);
  EXPECT_EQ(m.eigenvalue(3).imag(), 0.0);
  for (int k = 1; k < 20; ++k) EXPECT_GT(m.eigenvalue(k).real(), m.eigenvalue(k + 1).real());
}

TEST(HeatModelTest, InitialProjectionsMatchQuadrature) {
  const SpectralModel m = heat_model(0.4, 0.27);
  EXPECT_NEAR(m.initial_projection(1).real(), 0.0, 1e-12);
  EXPECT_NEAR(m.initial_projection(2).real(), 4.0 * kSqrt2 / (3.0 * kPi), 1e-12);
  for (int k = 1; k <= 8; ++k) {
    const double q = oracle::simpson([k](double x) { return std::cos(kPi * x) * kSqrt2 * std::sin(k * kPi * x); },
                                     0.0, 1.0, 1e-13);
    EXPECT_NEAR(m.initial_projection(k).real(), q, 1e-9) << k;
  }
}

TEST(HeatModelTest, ActuatorProjectionUsesClippedSupport) {
  const double eps = 0.4, x0 = 0.27;
  const SpectralModel m = heat_model(eps, x0);
  const double closed = kSqrt2 / (eps * kPi) * (std::cos(kPi * 0.0) - std::cos(kPi * 0.67));
  EXPECT_NEAR(m.input_projection(1)[0].real(), closed, 1e-12);
  const Interval s = actuator_support(eps, x0);
  EXPECT_EQ(s.lo, 0.0);
  EXPECT_NEAR(s.hi, 0.67, 1e-15);
  for (int k = 1; k <= 8; ++k) {
    const double q = oracle::simpson([k](double x) { return kSqrt2 * std::sin(k * kPi * x); }, s.lo, s.hi, 1e-13) / eps;
    EXPECT_NEAR(m.input_projection(k)[0].real(), q, 1e-9) << k;
  }
}

TEST(HeatModelTest, LibraryQuadratureMatchesClosedForms) {
  for (int k = 1; k <= 6; ++k) {
    const double q = integrate([k](double x) { return kSqrt2 * std::sin(k * kPi * x); }, 0.0, 0.67, 1e-10) / 0.4;
    EXPECT_NEAR(q, heat_actuator_projection(k, 0.4, 0.27), 1e-9);
  }
  const double breaks[] = {0.5};
  EXPECT_NEAR(integrate([](double x) { return x < 0.5 ? 1.0 : 3.0; }, 0.0, 1.0, 1e-10, breaks), 2.0, 1e-12);
}

TEST(HeatModelTest, DomainChecks) {
  EXPECT_THROW(heat_model(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(heat_model(0.4, 1.2), std::invalid_argument);
  EXPECT_THROW(heat_model(0.4, 0.27).eigenvalue(0), std::out_of_range);
}

TEST(WaveModelTest, EigenvaluesComeInConjugatePairs) {
  const SpectralModel m = wave_model(0.4, 0.27);
  EXPECT_NEAR(m.eigenvalue(2).imag(), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(m.eigenvalue(-2).imag(), -2.0 * kPi, 1e-14);
  for (int k = 1; k <= 8; ++k) {
    EXPECT_EQ(m.eigenvalue(-k), std::conj(m.eigenvalue(k)));
    EXPECT_EQ(m.eigenvalue(k).real(), 0.0);
  }
  EXPECT_THROW(m.eigenvalue(0), std::out_of_range);
  EXPECT_THROW(m.eigenvalue(9), std::out_of_range);
}

TEST(WaveModelTest, RealDataGivesConjugateSymmetricCoordinates) {
  const SpectralModel m = wave_model(0.4, 0.27);
  for (int k = 1; k <= 8; ++k) {
    EXPECT_NEAR(std::abs(m.initial_projection(-k) - std::conj(m.initial_projection(k))), 0.0, 1e-10) << k;
    EXPECT_NEAR(std::abs(m.input_projection(-k)[0] - std::conj(m.input_projection(k)[0])), 0.0, 1e-10) << k;
  }
}

TEST(WaveModelTest, DisplacementProjectionIsSupportedOnModeTwo) {
  // The displacement sin(2 pi x) enters through w' = 2 pi cos(2 pi x), which
  // is orthogonal to every cos(l pi x) except l = 2.
  const SpectralModel m = wave_model(0.4, 0.27);
  for (int k = 1; k <= 8; ++k) {
    const double q = oracle::simpson(
        [k](double x) { return 2.0 * kPi * std::cos(2.0 * kPi * x) * std::cos(k * kPi * x); }, 0.0, 1.0, 1e-13);
    if (k == 2) {
      EXPECT_GT(std::abs(q), 1.0);
    } else {
      EXPECT_NEAR(q, 0.0, 1e-10);
    }
    EXPECT_NEAR(m.initial_projection(k).imag(), q, 1e-9) << k;
  }
}

TEST(WaveModelTest, ProjectionsReconstructTheInitialVelocity) {
  // Velocity component of sum_k z_k Phi_k is sum_k z_k sin(k pi x).
  const SpectralModel m = wave_model(0.4, 0.27, 8);
  for (double x : {0.1, 0.3, 0.45}) {
    double v = 0.0;
    for (int k = 1; k <= 8; ++k) {
      v += (m.initial_projection(k) + m.initial_projection(-k)).real() * std::sin(k * kPi * x);
    }
    const double s = std::sin(2.0 * kPi * x);
    EXPECT_NEAR(v, s * s, 0.03) << x;
  }
}

TEST(TruncationTest, HeatIsDiagonal) {
  const ModalSystem sys = truncate_and_realify(heat_model(0.4, 0.27), 3, BoundsConfig{}, Horizon::fixed(1.0));
  ASSERT_EQ(sys.dimension(), 3);
  Eigen::Matrix3d expected = Eigen::Vector3d(-kPi * kPi, -4 * kPi * kPi, -9 * kPi * kPi).asDiagonal();
  EXPECT_LT((sys.drift() - expected).norm(), 1e-12);
  EXPECT_EQ(sys.controls(), 1);
}

TEST(TruncationTest, WaveHasFourRealStatesPerMode) {
  for (int n : {1, 2, 3}) {
    const ModalSystem sys = truncate_and_realify(wave_model(0.4, 0.27), n, BoundsConfig{}, Horizon::fixed(1.0));
    EXPECT_EQ(sys.dimension(), 4 * n);
    EXPECT_EQ(static_cast<int>(sys.blocks().size()), 2 * n);
    for (const ModeBlock& b : sys.blocks()) {
      EXPECT_EQ(b.size, 2);
      const auto blk = sys.drift().block(b.first, b.first, 2, 2);
      EXPECT_EQ(blk(0, 1), -b.eigenvalue.imag());
      EXPECT_EQ(blk(1, 0), b.eigenvalue.imag());
    }
  }
}

TEST(TruncationTest, RealModeRealificationIsIdentity) {
  const SpectralModel m = custom_model("one", {{Complex(-2.0, 0.0), {Complex(0.5, 0.0)}, Complex(0.3, 0.0)}});
  const ModalSystem sys = truncate_and_realify(m, 1, BoundsConfig{}, Horizon::fixed(1.0));
  EXPECT_EQ(sys.dimension(), 1);
  EXPECT_EQ(sys.drift()(0, 0), -2.0);
  EXPECT_EQ(sys.input()(0, 0), 0.5);
  EXPECT_EQ(sys.z0()(0), 0.3);
}

TEST(TruncationTest, DefaultAndOverriddenBounds) {
  BoundsConfig cfg;
  const ModalSystem sys = truncate_and_realify(heat_model(0.4, 0.27), 3, cfg, Horizon::free(1.0));
  const double zmax = sys.z0().cwiseAbs().maxCoeff();
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(sys.state_bounds()[k], (Interval{-2 * zmax, 2 * zmax}));
    EXPECT_EQ(sys.terminal_bounds()[k], (Interval{0.0, 0.0}));
  }
  cfg.terminal_slack = 0.1;
  cfg.state_overrides = {std::nullopt, Interval{-3.0, 3.0}};
  const ModalSystem over = truncate_and_realify(heat_model(0.4, 0.27), 3, cfg, Horizon::free(1.0));
  EXPECT_EQ(over.state_bounds()[1], (Interval{-3.0, 3.0}));
  EXPECT_EQ(over.terminal_bounds()[2], (Interval{-0.1, 0.1}));
}

TEST(TruncationTest, InfeasibleInitialConditionIsRejected) {
  BoundsConfig cfg;
  cfg.state_overrides = {std::nullopt, Interval{0.7, 1.0}};
  try {
    truncate_and_realify(heat_model(0.4, 0.27), 2, cfg, Horizon::fixed(1.0));
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible initial condition"), std::string::npos);
  }
}

// Realified blocks reproduce the complex flow e^{lambda t} z0.
TEST(RealificationTest, PreservesComplexFlow) {
  for (Complex lambda : {Complex(0.0, kPi), Complex(-kPi * kPi, 0.0), Complex(-0.5, 2.0)}) {
    const Complex z0 = lambda.imag() == 0.0 ? Complex(0.4, 0.0) : Complex(0.4, -0.3);
    const SpectralModel m = custom_model("c", {{lambda, {Complex(1.0, 0.0)}, z0}});
    BoundsConfig cfg;
    cfg.state_scale = 10.0;
    const ModalSystem sys = truncate_and_realify(m, 1, cfg, Horizon::fixed(1.0));
    const auto rhs = [&](double, const Eigen::VectorXd& z) -> Eigen::VectorXd { return sys.drift() * z; };
    for (double t : {0.25, 0.5, 1.0}) {
      const Eigen::VectorXd z = oracle::rk4(rhs, sys.z0(), 0.0, t, 4000);
      const Complex exact = std::exp(lambda * t) * z0;
      if (sys.dimension() == 1) {
        EXPECT_NEAR(z(0), exact.real(), 1e-8);
      } else {
        EXPECT_NEAR(z(0), exact.real(), 1e-8);
        EXPECT_NEAR(z(1), exact.imag(), 1e-8);
      }
    }
  }
}

TEST(RealificationTest, UncontrolledHeatModesDecayExponentially) {
  const ModalSystem sys = truncate_and_realify(heat_model(0.4, 0.27), 3, BoundsConfig{}, Horizon::fixed(1.0));
  const auto rhs = [&](double, const Eigen::VectorXd& z) -> Eigen::VectorXd { return sys.drift() * z; };
  const Eigen::VectorXd z = oracle::rk4(rhs, sys.z0(), 0.0, 0.3, 20000);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(z(k), std::exp(sys.drift()(k, k) * 0.3) * sys.z0()(k), 1e-8);
  }
}

}  // namespace
}  // namespace rieszocp
