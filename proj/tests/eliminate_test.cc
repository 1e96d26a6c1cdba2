#include <cmath>

#include <gtest/gtest.h>

#include "rieszocp/relaxation.h"
#include "rieszocp/sdp.h"
#include "rieszocp/spectral.h"

namespace rieszocp {
namespace {

Eigen::SparseMatrix<double, Eigen::RowMajor> Sparse(const Eigen::MatrixXd& A) { return A.sparseView(); }

SdpBlock Diagonal(int size, std::vector<BlockTerm> terms) {
  SdpBlock b;
  b.size = size;
  b.diagonal = true;
  b.terms = std::move(terms);
  return b;
}

TEST(EliminateTest, SingleRow) {
  Eigen::MatrixXd E(1, 2);
  E << 1, 0;
  const Elimination el = eliminate_equalities(Sparse(E), Eigen::VectorXd::Ones(1), {}, Eigen::Vector2d(0, 1), 0.0);
  ASSERT_TRUE(el.consistent);
  EXPECT_EQ(el.rank, 1);
  EXPECT_EQ(el.sdp.nvar, 1);
  EXPECT_EQ(el.recovery.base, Eigen::Vector2d(1, 0));
  const Eigen::MatrixXd Z = el.recovery.basis;
  EXPECT_EQ(Z, Eigen::Vector2d(0, 1));
  EXPECT_EQ(el.sdp.objective(0), 1.0);
}

TEST(EliminateTest, EmptySystemIsIdentity) {
  const Eigen::SparseMatrix<double, Eigen::RowMajor> E(0, 3);
  const Eigen::Vector3d c(1, -2, 3);
  const Elimination el = eliminate_equalities(E, Eigen::VectorXd(0), {}, c, 0.5);
  ASSERT_TRUE(el.consistent);
  EXPECT_EQ(el.rank, 0);
  EXPECT_EQ(el.sdp.nvar, 3);
  EXPECT_EQ(Eigen::MatrixXd(el.recovery.basis), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_EQ(el.recovery.base, Eigen::Vector3d::Zero());
  EXPECT_EQ(el.sdp.objective, c);
  EXPECT_EQ(el.sdp.objective_offset, 0.5);
}

TEST(EliminateTest, InconsistentSystemReportsResidual) {
  Eigen::MatrixXd E(2, 2);
  E << 1, 1, 2, 2;
  const Elimination el = eliminate_equalities(Sparse(E), Eigen::Vector2d(1, 3), {}, Eigen::Vector2d(1, 1), 0.0);
  EXPECT_FALSE(el.consistent);
  EXPECT_NEAR(el.residual, 1.0, 1e-12);
  EXPECT_EQ(el.rank, 1);
}

TEST(EliminateTest, RedundantRowsAreDropped) {
  Eigen::MatrixXd E(3, 4);
  E << 1, 2, 0, 1, 0, 1, 1, 0, 1, 3, 1, 1;
  const Eigen::Vector3d f(1, 2, 3);
  const Elimination el = eliminate_equalities(Sparse(E), f, {}, Eigen::Vector4d(1, 0, 0, 0), 0.0);
  ASSERT_TRUE(el.consistent);
  EXPECT_EQ(el.rank, 2);
  EXPECT_EQ(el.sdp.nvar, 2);
  for (const Eigen::Vector2d& w : {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, -3), Eigen::Vector2d(0.25, 7)}) {
    EXPECT_LT((E * el.recovery.recover(w) - f).norm(), 1e-13);
  }
  // Null-space basis: E Z = 0 with full column rank.
  const Eigen::MatrixXd Z = el.recovery.basis;
  EXPECT_LT((E * Z).norm(), 1e-13);
  EXPECT_EQ(Z.fullPivLu().rank(), 2);
}

TEST(EliminateTest, BlocksAndObjectiveAreSubstituted) {
  // x0 + x1 = 1; block diag(x0, x1); objective x0.
  Eigen::MatrixXd E(1, 2);
  E << 1, 1;
  const SdpBlock b = Diagonal(2, {{0, 0, 0, 1.0}, {1, 1, 1, 1.0}});
  const Elimination el = eliminate_equalities(Sparse(E), Eigen::VectorXd::Ones(1), {b}, Eigen::Vector2d(1, 0), 0.0);
  ASSERT_EQ(el.sdp.nvar, 1);
  for (double w : {-1.0, 0.3, 2.0}) {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, w);
    const Eigen::VectorXd v = el.recovery.recover(x);
    EXPECT_NEAR(el.sdp.objective_value(x), v(0), 1e-15);
    const Eigen::MatrixXd M = el.sdp.blocks[0].evaluate(x);
    EXPECT_NEAR(M(0, 0), v(0), 1e-15);
    EXPECT_NEAR(M(1, 1), v(1), 1e-15);
  }
}

TEST(EliminateTest, UnitRowPinsTerminalMass) {
  const ControlSet box = ControlSet::box({{-1.0, 1.0}});
  const Polynomial cost(ControlSet::layout(1), 1.0);
  for (bool free : {false, true}) {
    const ModalSystem sys = truncate_and_realify(heat_model(0.4, 0.27), 2, {},
                                                 free ? Horizon::free(1.0) : Horizon::fixed(0.5));
    const SDPProblem p = build_relaxation(sys, box, cost, 2);
    for (bool reduce : {false, true}) {
      const Elimination el = eliminate_equalities(p, reduce);
      ASSERT_TRUE(el.consistent);
      EXPECT_NEAR(el.recovery.base(p.terminal_offset), 1.0, 1e-14);
      const Eigen::SparseMatrix<double> Z = el.recovery.basis;
      double row_norm = 0.0;
      for (int k = 0; k < Z.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(Z, k); it; ++it) {
          if (it.row() == p.terminal_offset) row_norm += std::abs(it.value());
        }
      }
      EXPECT_EQ(row_norm, 0.0);
      // Every recovered vector satisfies the Liouville rows.
      const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(el.sdp.nvar, -0.5, 0.5);
      EXPECT_LT(p.equality_residual(el.recovery.recover(w)).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(EliminateTest, PointTerminalReductionKeepsValue) {
  // Terminal set collapsed to the origin: the reduced problem solves to the
  // same bound as the unreduced one.
  const ControlSet box = ControlSet::box({{-1.0, 1.0}});
  const Polynomial cost(ControlSet::layout(1), 1.0);
  const ModalSystem sys = truncate_and_realify(heat_model(0.4, 0.27), 1, {}, Horizon::free(1.0));
  const SDPProblem p = build_relaxation(sys, box, cost, 2);
  const Elimination reduced = eliminate_equalities(p, true);
  const Elimination plain = eliminate_equalities(p, false);
  ASSERT_TRUE(reduced.consistent);
  EXPECT_LT(reduced.sdp.nvar, plain.sdp.nvar);
  const SolveReport a = solve(reduced.sdp);
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  const Eigen::VectorXd v = reduced.recovery.recover(a.x);
  EXPECT_LT(p.equality_residual(v).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(p.objective_value(v), a.objective, 1e-9);
  const SolveReport b = solve(plain.sdp);
  EXPECT_NEAR(b.objective, a.objective, 1e-3);
}

}  // namespace
}  // namespace rieszocp
