#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "rieszocp/sdp.h"

namespace rieszocp {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

Eigen::MatrixXd SdpBlock::evaluate(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size, size);
  for (const BlockTerm& t : terms) {
    const double v = t.coef * (t.var < 0 ? 1.0 : x(t.var));
    M(t.row, t.col) += v;
    if (t.row != t.col) M(t.col, t.row) += v;
  }
  return M;
}

void StandardSDP::validate() const {
  if (objective.size() != nvar) throw std::invalid_argument("StandardSDP: objective length differs from nvar");
  if (blocks.empty()) throw std::invalid_argument("StandardSDP: no blocks");
  for (const SdpBlock& b : blocks) {
    if (b.size < 1) throw std::invalid_argument("StandardSDP: block size must be >= 1");
    for (const BlockTerm& t : b.terms) {
      if (t.row < 0 || t.col < t.row || t.col >= b.size) throw std::invalid_argument("StandardSDP: bad entry position");
      if (t.var < -1 || t.var >= nvar) throw std::invalid_argument("StandardSDP: bad variable index");
      if (b.diagonal && t.row != t.col) throw std::invalid_argument("StandardSDP: off-diagonal entry in diagonal block");
    }
  }
}

double StandardSDP::min_eigenvalue(const Eigen::VectorXd& x) const {
  double lmin = std::numeric_limits<double>::infinity();
  for (const SdpBlock& b : blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.evaluate(x), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  return lmin;
}

namespace {

using Clock = std::chrono::steady_clock;

struct VarGroup {
  int var;
  std::vector<SymEntry> entries;
  std::vector<int> rows;  // distinct row indices touched by the symmetric matrix
};

// The dense kernel is templated on the working precision.
template <typename Real>
class InteriorPoint {
 public:
  using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  InteriorPoint(const StandardSDP& sdp, const SolverOptions& opt) : sdp_(sdp), opt_(opt) { prepare(); }

  SolveReport run();

 private:
  struct Block {
    int size{0};
    Matrix constant;               // A_0 (normalized)
    std::vector<VarGroup> groups;  // sorted by variable
  };

  void prepare();
  static Real inner(const std::vector<SymEntry>& entries, const Matrix& G);
  Matrix apply_block(const Block& b, const Vector& x, bool with_constant) const;
  static void accumulate_schur(const Block& b, const Matrix& W, Matrix& M);
  static Real max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dY);

  const StandardSDP& sdp_;
  const SolverOptions& opt_;
  std::vector<Block> blocks_;
};

template <typename Real>
void InteriorPoint<Real>::prepare() {
  for (const SdpBlock& b : sdp_.blocks) {
    Block pb;
    pb.size = b.size;
    pb.constant = Matrix::Zero(b.size, b.size);
    // Each block is normalized by the Frobenius norm of its coefficients.
    double norm2 = 0.0;
    for (const BlockTerm& t : b.terms) norm2 += (t.row == t.col ? 1.0 : 2.0) * t.coef * t.coef;
    const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;

    std::vector<BlockTerm> terms = b.terms;
    std::stable_sort(terms.begin(), terms.end(), [](const BlockTerm& a, const BlockTerm& c) { return a.var < c.var; });
    std::vector<int> mark(b.size, -1);
    for (const BlockTerm& t : terms) {
      const double v = t.coef * scale;
      if (t.var < 0) {
        pb.constant(t.row, t.col) += v;
        if (t.row != t.col) pb.constant(t.col, t.row) += v;
        continue;
      }
      if (pb.groups.empty() || pb.groups.back().var != t.var) pb.groups.push_back({t.var, {}, {}});
      VarGroup& g = pb.groups.back();
      g.entries.push_back({t.row, t.col, v});
      for (int r : {t.row, t.col}) {
        if (mark[r] != t.var) {
          mark[r] = t.var;
          g.rows.push_back(r);
        }
      }
    }
    blocks_.push_back(std::move(pb));
  }
}

// <A_i, G> for a possibly nonsymmetric G.
template <typename Real>
Real InteriorPoint<Real>::inner(const std::vector<SymEntry>& entries, const Matrix& G) {
  Real s = 0;
  for (const SymEntry& e : entries) {
    s += e.row == e.col ? e.value * G(e.row, e.row) : e.value * (G(e.row, e.col) + G(e.col, e.row));
  }
  return s;
}

// sum_i x_i A_i (+ A_0 when with_constant).
template <typename Real>
auto InteriorPoint<Real>::apply_block(const Block& b, const Vector& x, bool with_constant) const -> Matrix {
  Matrix M = with_constant ? b.constant : Matrix::Zero(b.size, b.size);
  for (const VarGroup& g : b.groups) {
    const Real xi = x(g.var);
    if (xi == 0) continue;
    for (const SymEntry& e : g.entries) {
      M(e.row, e.col) += xi * e.value;
      if (e.row != e.col) M(e.col, e.row) += xi * e.value;
    }
  }
  return M;
}

// Upper triangle of M += [tr(A_i W A_j W)]_{ij} for one block.
template <typename Real>
void InteriorPoint<Real>::accumulate_schur(const Block& b, const Matrix& W, Matrix& M) {
  const int n = b.size;
  std::size_t max_rows = 0;
  for (const VarGroup& g : b.groups) max_rows = std::max(max_rows, g.rows.size());
  Matrix P(max_rows, n), Wc(n, max_rows), G(n, n);
  std::vector<int> pos(n, -1);
  for (std::size_t gi = 0; gi < b.groups.size(); ++gi) {
    const VarGroup& g = b.groups[gi];
    const int k = static_cast<int>(g.rows.size());
    for (int q = 0; q < k; ++q) pos[g.rows[q]] = q;
    P.topRows(k).setZero();
    for (const SymEntry& e : g.entries) {
      P.row(pos[e.row]).noalias() += e.value * W.row(e.col);
      if (e.row != e.col) P.row(pos[e.col]).noalias() += e.value * W.row(e.row);
    }
    for (int q = 0; q < k; ++q) Wc.col(q) = W.col(g.rows[q]);
    G.noalias() = Wc.leftCols(k) * P.topRows(k);  // W A_i W
    for (std::size_t gj = gi; gj < b.groups.size(); ++gj) {
      const VarGroup& h = b.groups[gj];
      Real s = 0;
      for (const SymEntry& e : h.entries) {
        s += e.row == e.col ? e.value * G(e.row, e.row) : e.value * (G(e.col, e.row) + G(e.row, e.col));
      }
      M(g.var, h.var) += s;
    }
  }
}

// Largest alpha with Y + alpha dY PSD, given the Cholesky factor of Y.
template <typename Real>
Real InteriorPoint<Real>::max_step(const Eigen::LLT<Matrix>& chol, const Matrix& dY) {
  const auto L = chol.matrixL();
  Matrix T = L.solve(dY);
  T = L.solve(T.transpose()).transpose();
  T = Real(0.5) * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(T, Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues()(0);
  return lmin >= 0 ? std::numeric_limits<Real>::infinity() : Real(-1) / lmin;
}

template <typename Real>
SolveReport InteriorPoint<Real>::run() {
  using std::abs;
  using std::sqrt;
  const auto t_start = Clock::now();
  const int n = sdp_.nvar;
  const int nb = static_cast<int>(blocks_.size());

  const double cscale = std::max(1.0, sdp_.objective.cwiseAbs().maxCoeff());
  const Vector c = (sdp_.objective / cscale).template cast<Real>();

  int total_dim = 0;
  Real a0_norm2 = 0;
  for (const auto& b : blocks_) {
    total_dim += b.size;
    a0_norm2 += b.constant.squaredNorm();
  }
  const Real a0_norm = sqrt(a0_norm2);
  const Real c_norm = c.norm();

  // Identity-scaled start.
  Vector x = Vector::Zero(n);
  std::vector<Matrix> X, S;
  for (const auto& b : blocks_) {
    const Real s0 = std::max(10.0, std::sqrt(static_cast<double>(b.size)));
    X.push_back(s0 * Matrix::Identity(b.size, b.size));
    S.push_back(s0 * Matrix::Identity(b.size, b.size));
  }

  SolveReport rep;
  double best_merit = std::numeric_limits<double>::infinity();
  Vector best_x = x;
  double best_p = 0, best_d = 0, best_pobj = 0, best_dobj = 0;
  int stall = 0;
  int progress_iter = 0;
  double progress_merit = std::numeric_limits<double>::infinity();

  const auto finish = [&](SolveStatus status, std::string msg, bool use_best) {
    rep.status = status;
    rep.message = std::move(msg);
    if (use_best && std::isfinite(best_merit)) {
      rep.x = best_x.template cast<double>();
      rep.primal_residual = best_p;
      rep.dual_residual = best_d;
      rep.objective = best_pobj;
      rep.dual_objective = best_dobj;
    }
    rep.objective += sdp_.objective_offset;
    rep.dual_objective += sdp_.objective_offset;
    rep.gap = rep.objective - rep.dual_objective;
    rep.seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
    return rep;
  };

  for (int iter = 0; iter <= opt_.max_iter; ++iter) {
    // Residuals at the current iterate.
    std::vector<Matrix> RS(nb);
    Real rs2 = 0;
    Vector Atx = Vector::Zero(n);  // A^*(X)
    Real dobj_r = 0, mu = 0;
    for (int b = 0; b < nb; ++b) {
      RS[b] = apply_block(blocks_[b], x, true) - S[b];
      rs2 += RS[b].squaredNorm();
      for (const VarGroup& g : blocks_[b].groups) Atx(g.var) += inner(g.entries, X[b]);
      dobj_r -= blocks_[b].constant.cwiseProduct(X[b]).sum();
      mu += X[b].cwiseProduct(S[b]).sum();
    }
    mu /= total_dim;
    const Vector rd = c - Atx;
    const double pobj = static_cast<double>(c.dot(x));
    const double dobj = static_cast<double>(dobj_r);
    const double p_res = static_cast<double>(sqrt(rs2) / (1 + a0_norm));
    const double d_res = static_cast<double>(rd.norm() / (1 + c_norm));
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    rep.iterations = iter;
    rep.objective = pobj * cscale;
    rep.dual_objective = dobj * cscale;
    rep.primal_residual = p_res;
    rep.dual_residual = d_res;
    rep.x = x.template cast<double>();

    const double merit = std::max({p_res, d_res, rel_gap});
    if (merit < 0.5 * progress_merit) {
      progress_merit = merit;
      progress_iter = iter;
    }
    if (merit < best_merit) {
      best_merit = merit;
      best_x = x;
      best_p = p_res;
      best_d = d_res;
      best_pobj = pobj * cscale;
      best_dobj = dobj * cscale;
    }

    if (opt_.verbose) {
      std::fprintf(stderr, "%3d  pobj % .10e  dobj % .10e  pres %.2e  dres %.2e  mu %.2e\n", iter, pobj * cscale,
                   dobj * cscale, p_res, d_res, static_cast<double>(mu));
    }
    if (p_res <= opt_.tol_feas && d_res <= opt_.tol_feas && rel_gap <= opt_.tol_gap) {
      return finish(SolveStatus::Optimal, "converged", false);
    }
    if (iter == opt_.max_iter) break;
    if (iter - progress_iter >= 20) {
      return finish(SolveStatus::NumericalFailure, "no progress in 20 iterations; best iterate returned", true);
    }
    if (std::chrono::duration<double>(Clock::now() - t_start).count() > opt_.time_limit_s) {
      return finish(SolveStatus::MaxIter, "time limit reached", true);
    }
    if (x.cwiseAbs().maxCoeff() > 1e12) {
      return finish(SolveStatus::Infeasible, "iterates diverge: dual infeasible (objective unbounded below)", true);
    }
    Real trX = 0;
    for (const auto& Xb : X) trX += Xb.trace();
    if (trX > 1e14 && p_res > 1e3 * opt_.tol_feas) {
      return finish(SolveStatus::Infeasible, "dual iterates diverge: LMI appears infeasible", true);
    }

    // Nesterov-Todd scaling W = G G^T with W S W = X and
    // G^{-1} X G^{-T} = G^T S G = diag(lambda).
    std::vector<Eigen::LLT<Matrix>> cholS(nb), cholX(nb);
    std::vector<Matrix> G(nb), Ginv(nb), W(nb);
    std::vector<Vector> lambda(nb);
    for (int b = 0; b < nb; ++b) {
      cholS[b].compute(S[b]);
      cholX[b].compute(X[b]);
      if (cholS[b].info() != Eigen::Success || cholX[b].info() != Eigen::Success) {
        return finish(SolveStatus::NumericalFailure, "lost positive definiteness of an iterate", true);
      }
      const Matrix LX = cholX[b].matrixL();
      const Matrix LS = cholS[b].matrixL();
      Eigen::BDCSVD<Matrix> svd(LS.transpose() * LX, Eigen::ComputeFullV);
      lambda[b] = svd.singularValues();
      G[b] = LX * svd.matrixV() * lambda[b].cwiseSqrt().cwiseInverse().asDiagonal();
      W[b] = G[b] * G[b].transpose();
      Ginv[b] = lambda[b].cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                LX.template triangularView<Eigen::Lower>().solve(Matrix::Identity(blocks_[b].size, blocks_[b].size));
    }
    Matrix M = Matrix::Zero(n, n);
    for (int b = 0; b < nb; ++b) accumulate_schur(blocks_[b], W[b], M);
    for (int i = 0; i < n; ++i) {
      if (!(M(i, i) > 0)) return finish(SolveStatus::NumericalFailure, "variable absent from every block", true);
    }
    // Diagonal equilibration, then Cholesky of the scaled Schur complement.
    const Vector dscale = M.diagonal().cwiseSqrt().cwiseInverse();
    Matrix Ms = dscale.asDiagonal() * M.template triangularView<Eigen::Upper>().toDenseMatrix() * dscale.asDiagonal();
    Eigen::LLT<Matrix, Eigen::Upper> cholM(Ms);
    if (cholM.info() != Eigen::Success) {
      Ms.diagonal().array() += Real(1e-13);
      cholM.compute(Ms);
      if (cholM.info() != Eigen::Success) {
        return finish(SolveStatus::NumericalFailure, "Schur complement is not positive definite", true);
      }
    }
    const auto schur_solve = [&](const Vector& rhs) {
      Vector d = dscale.cwiseProduct(cholM.solve(dscale.cwiseProduct(rhs)));
      const Vector res = rhs - M.template selfadjointView<Eigen::Upper>() * d;
      d += dscale.cwiseProduct(cholM.solve(dscale.cwiseProduct(res)));
      return d;
    };

    // Complementarity in the scaled space: lambda o (dX~ + dS~) = R, solved
    // as dX~ + dS~ = Rc with Rc_ij = 2 R_ij / (lambda_i + lambda_j).
    std::vector<Matrix> WRW(nb);
    for (int b = 0; b < nb; ++b) WRW[b] = W[b] * RS[b] * W[b];
    const auto direction = [&](Real target, const std::vector<Matrix>* corr, Vector& dx, std::vector<Matrix>& dS,
                               std::vector<Matrix>& dX) {
      Vector rhs = -rd;
      std::vector<Matrix> Rc(nb);
      for (int b = 0; b < nb; ++b) {
        const Vector& l = lambda[b];
        Matrix R = -Matrix(l.cwiseAbs2().asDiagonal());
        R.diagonal().array() += target;
        if (corr) R -= (*corr)[b];
        for (int j = 0; j < l.size(); ++j) {
          for (int i = 0; i < l.size(); ++i) R(i, j) *= 2 / (l(i) + l(j));
        }
        Rc[b] = R;
        Matrix T = G[b] * R * G[b].transpose() - WRW[b];
        T = Real(0.5) * (T + T.transpose());
        for (const VarGroup& g : blocks_[b].groups) rhs(g.var) += inner(g.entries, T);
      }
      dx = schur_solve(rhs);
      dS.resize(nb);
      dX.resize(nb);
      // Refine against the operator actually applied so that A^*(dX) = rd
      // holds as closely as rounding allows.
      for (int pass = 0; pass < 3; ++pass) {
        Vector err = -rd;
        for (int b = 0; b < nb; ++b) {
          dS[b] = RS[b] + apply_block(blocks_[b], dx, false);
          const Matrix dSs = G[b].transpose() * dS[b] * G[b];
          const Matrix D = G[b] * (Rc[b] - Real(0.5) * (dSs + dSs.transpose())) * G[b].transpose();
          dX[b] = Real(0.5) * (D + D.transpose());
          for (const VarGroup& g : blocks_[b].groups) err(g.var) += inner(g.entries, dX[b]);
        }
        if (pass == 2 || err.norm() <= Real(1e-14) * (1 + rd.norm())) break;
        dx += schur_solve(err);
      }
    };
    const auto step_lengths = [&](const std::vector<Matrix>& dS, const std::vector<Matrix>& dX) {
      Real ap = std::numeric_limits<Real>::infinity(), ad = ap;
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(cholS[b], dS[b]));
        ad = std::min(ad, max_step(cholX[b], dX[b]));
      }
      return std::pair{std::min(Real(1), ap), std::min(Real(1), ad)};
    };

    // Predictor.
    Vector dx_a;
    std::vector<Matrix> dS_a, dX_a;
    direction(0, nullptr, dx_a, dS_a, dX_a);
    const auto [ap_a, ad_a] = step_lengths(dS_a, dX_a);
    Real mu_aff = 0;
    for (int b = 0; b < nb; ++b) mu_aff += (X[b] + ad_a * dX_a[b]).cwiseProduct(S[b] + ap_a * dS_a[b]).sum();
    mu_aff /= total_dim;
    // Centering weight and step fraction adapt to how far the predictor got.
    const double amin = static_cast<double>(std::min(ap_a, ad_a));
    const double expon = std::max(1.0, 3.0 * amin * amin);
    const double sigma = std::clamp(std::pow(std::max(static_cast<double>(mu_aff / mu), 0.0), expon), 0.0, 1.0);

    // Corrector with the symmetrized second-order term.
    std::vector<Matrix> corr(nb);
    for (int b = 0; b < nb; ++b) {
      const Matrix P = (Ginv[b] * dX_a[b] * Ginv[b].transpose()) * (G[b].transpose() * dS_a[b] * G[b]);
      corr[b] = Real(0.5) * (P + P.transpose());
    }
    Vector dx;
    std::vector<Matrix> dS, dX;
    direction(Real(sigma) * mu, &corr, dx, dS, dX);
    auto [ap, ad] = step_lengths(dS, dX);
    const Real tau = 0.9 + 0.09 * amin;
    ap = std::min(Real(1), tau * ap);
    ad = std::min(Real(1), tau * ad);
    if (opt_.verbose) {
      std::fprintf(stderr, "     sigma %.2e  ap %.3e  ad %.3e\n", sigma, static_cast<double>(ap),
                   static_cast<double>(ad));
    }

    // Shorten the steps while rounding leaves an updated iterate indefinite.
    for (int attempt = 0;; ++attempt) {
      bool definite = true;
      for (int b = 0; b < nb && definite; ++b) {
        definite = Eigen::LLT<Matrix>(S[b] + ap * dS[b]).info() == Eigen::Success &&
                   Eigen::LLT<Matrix>(X[b] + ad * dX[b]).info() == Eigen::Success;
      }
      if (definite) break;
      if (attempt == 8) return finish(SolveStatus::NumericalFailure, "lost positive definiteness of an iterate", true);
      ap *= Real(0.5);
      ad *= Real(0.5);
    }
    x += ap * dx;
    for (int b = 0; b < nb; ++b) {
      S[b] += ap * dS[b];
      X[b] += ad * dX[b];
    }
    rep.history.push_back({iter, pobj * cscale + sdp_.objective_offset, dobj * cscale + sdp_.objective_offset, p_res,
                           d_res, static_cast<double>(mu), static_cast<double>(ap), static_cast<double>(ad)});

    if (std::max(ap, ad) < Real(1e-10)) {
      if (++stall >= 3) return finish(SolveStatus::NumericalFailure, "step lengths collapsed", true);
    } else {
      stall = 0;
    }
  }
  return finish(SolveStatus::MaxIter, "iteration limit reached", true);
}

}  // namespace

SolveReport solve(const StandardSDP& sdp, const SolverOptions& opt) {
  sdp.validate();
  if (opt.extended_precision) return InteriorPoint<long double>(sdp, opt).run();
  return InteriorPoint<double>(sdp, opt).run();
}

}  // namespace rieszocp
