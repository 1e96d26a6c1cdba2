#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "rieszocp/sdp.h"

namespace rieszocp {

namespace {

using Row = std::map<int, double>;

// Merges duplicate (row, col, var) terms and drops exact zeros.
std::vector<BlockTerm> merge_terms(const std::vector<BlockTerm>& terms) {
  std::map<std::tuple<int, int, int>, double> acc;
  for (const BlockTerm& t : terms) acc[{t.var, t.row, t.col}] += t.coef;
  std::vector<BlockTerm> out;
  out.reserve(acc.size());
  for (const auto& [key, c] : acc) {
    if (c == 0.0) continue;
    out.push_back({std::get<1>(key), std::get<2>(key), std::get<0>(key), c});
  }
  return out;
}

}  // namespace

Elimination eliminate_equalities(const Eigen::SparseMatrix<double, Eigen::RowMajor>& E, const Eigen::VectorXd& f,
                                 const std::vector<SdpBlock>& blocks, const Eigen::VectorXd& objective,
                                 double objective_offset, const std::vector<int>& column_priority) {
  const int nrows = static_cast<int>(E.rows());
  const int n = static_cast<int>(E.cols());
  if (f.size() != nrows || objective.size() != n) throw std::invalid_argument("eliminate_equalities: size mismatch");
  if (!column_priority.empty() && static_cast<int>(column_priority.size()) != n) {
    throw std::invalid_argument("eliminate_equalities: column priority has the wrong length");
  }

  double norm = 0.0;  // max absolute row sum
  std::vector<Row> rows(nrows);
  std::vector<std::vector<int>> col_rows(n);
  for (int i = 0; i < nrows; ++i) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(E, i); it; ++it) {
      if (it.value() == 0.0) continue;
      rows[i][static_cast<int>(it.col())] = it.value();
      col_rows[it.col()].push_back(i);
      s += std::abs(it.value());
    }
    norm = std::max(norm, s);
  }
  const double rank_tol = 1e-10 * std::max(norm, 1e-300);
  const double drop_tol = 1e-15 * std::max(norm, 1e-300);
  Eigen::VectorXd rhs = f;

  std::vector<int> pivot_col(nrows, -1);
  std::vector<int> pivot_row_of_col(n, -1);
  int rank = 0;

  for (int i = 0; i < nrows; ++i) {
    Row& row = rows[i];
    double amax = 0.0;
    for (const auto& [c, a] : row) amax = std::max(amax, std::abs(a));
    if (amax <= rank_tol) {
      row.clear();
      continue;
    }
    // Threshold partial pivoting; among acceptable entries prefer low priority.
    int best = -1;
    for (const auto& [c, a] : row) {
      if (std::abs(a) < 0.1 * amax) continue;
      if (best < 0) {
        best = c;
        continue;
      }
      const int pc = column_priority.empty() ? 0 : column_priority[c];
      const int pb = column_priority.empty() ? 0 : column_priority[best];
      if (pc < pb || (pc == pb && std::abs(a) > std::abs(row.at(best)))) best = c;
    }
    const double piv = row.at(best);
    for (auto& [c, a] : row) a /= piv;
    rhs(i) /= piv;
    row[best] = 1.0;
    pivot_col[i] = best;
    pivot_row_of_col[best] = i;
    ++rank;

    // Gauss-Jordan: remove the pivot column from every other row.
    const std::vector<int> touched = col_rows[best];
    for (int j : touched) {
      if (j == i) continue;
      Row& other = rows[j];
      auto it = other.find(best);
      if (it == other.end()) continue;
      const double factor = it->second;
      for (const auto& [c, a] : row) {
        auto [ot, inserted] = other.try_emplace(c, 0.0);
        if (inserted) col_rows[c].push_back(j);
        ot->second -= factor * a;
        if (std::abs(ot->second) <= drop_tol) other.erase(ot);
      }
      other.erase(best);
      rhs(j) -= factor * rhs(i);
    }
    col_rows[best] = {i};
  }

  Elimination out;
  out.rank = rank;

  std::vector<int> free_index(n, -1);
  int nfree = 0;
  for (int c = 0; c < n; ++c) {
    if (pivot_row_of_col[c] < 0) free_index[c] = nfree++;
  }

  Eigen::VectorXd base = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> ztrips;
  for (int c = 0; c < n; ++c) {
    if (free_index[c] >= 0) ztrips.emplace_back(c, free_index[c], 1.0);
  }
  for (int i = 0; i < nrows; ++i) {
    const int p = pivot_col[i];
    if (p < 0) continue;
    base(p) = rhs(i);
    for (const auto& [c, a] : rows[i]) {
      if (c == p) continue;
      ztrips.emplace_back(p, free_index[c], -a);
    }
  }
  out.recovery.base = base;
  out.recovery.basis.resize(n, nfree);
  out.recovery.basis.setFromTriplets(ztrips.begin(), ztrips.end());

  out.residual = (E * base - f).norm();
  out.consistent = out.residual <= 1e-9 * std::max(1.0, f.norm());

  out.sdp.nvar = nfree;
  out.sdp.objective = out.recovery.basis.transpose() * objective;
  out.sdp.objective_offset = objective_offset + objective.dot(base);
  for (const SdpBlock& b : blocks) {
    std::vector<BlockTerm> terms;
    terms.reserve(b.terms.size());
    for (const BlockTerm& t : b.terms) {
      if (t.var < 0) {
        terms.push_back(t);
      } else if (free_index[t.var] >= 0) {
        terms.push_back({t.row, t.col, free_index[t.var], t.coef});
      } else {
        const int i = pivot_row_of_col[t.var];
        if (base(t.var) != 0.0) terms.push_back({t.row, t.col, -1, t.coef * base(t.var)});
        for (const auto& [c, a] : rows[i]) {
          if (c == t.var) continue;
          terms.push_back({t.row, t.col, free_index[c], -t.coef * a});
        }
      }
    }
    SdpBlock nb;
    nb.size = b.size;
    nb.diagonal = b.diagonal;
    nb.terms = merge_terms(terms);
    out.sdp.blocks.push_back(std::move(nb));
  }
  return out;
}

Elimination eliminate_equalities(const SDPProblem& problem, bool reduce_point_terminals) {
  const int nvar = problem.num_variables();
  const MonomialBasis& tb = *problem.terminal_basis;
  const int nv = problem.layout.size();

  // Terminal slots pinned to a single value.
  std::vector<std::pair<int, double>> pinned;
  if (reduce_point_terminals) {
    for (int k = 0; k < problem.modes; ++k) {
      const Interval& iv = problem.terminal_bounds_internal.at(k);
      if (iv.hi - iv.lo <= 1e-14 * std::max(1.0, std::abs(iv.lo))) pinned.emplace_back(problem.layout.mode(k), iv.center());
    }
  }
  const auto is_free_of_pinned = [&](const MultiIndex& a) {
    for (const auto& [slot, c] : pinned) {
      if (a[slot] != 0) return false;
    }
    return true;
  };

  // Equalities, extended by the point-terminal identities.
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < problem.equalities.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(problem.equalities, i); it; ++it) {
      trips.emplace_back(i, static_cast<int>(it.col()), it.value());
    }
  }
  std::vector<double> rhs(problem.rhs.data(), problem.rhs.data() + problem.rhs.size());
  int nrows = static_cast<int>(rhs.size());
  for (int a = 0; a < tb.size(); ++a) {
    const MultiIndex& alpha = tb[a];
    for (const auto& [slot, c] : pinned) {
      if (alpha[slot] == 0) continue;
      const int lower = tb.index_of(alpha.with(slot, alpha[slot] - 1));
      trips.emplace_back(nrows, problem.terminal_offset + a, 1.0);
      if (c != 0.0) trips.emplace_back(nrows, problem.terminal_offset + lower, -c);
      rhs.push_back(0.0);
      ++nrows;
      break;  // one identity per monomial suffices
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> E(nrows, nvar);
  E.setFromTriplets(trips.begin(), trips.end());
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(rhs.data(), nrows);

  std::vector<SdpBlock> blocks;
  std::vector<int> origin;
  for (std::size_t b = 0; b < problem.blocks.size(); ++b) {
    const AffineBlock& blk = problem.blocks[b];
    if (pinned.empty() || blk.spec.measure != MeasureTag::Terminal) {
      blocks.push_back({blk.size, false, blk.terms});
      origin.push_back(static_cast<int>(b));
      continue;
    }
    // A localizer of a pinned slot vanishes identically.
    bool vanishes = false;
    for (const auto& [slot, value] : pinned) {
      const std::vector<int> only{slot};
      if (blk.spec.shift_poly.degree() > 0 && blk.spec.shift_poly.supported_on(only)) vanishes = true;
    }
    if (vanishes) continue;
    const MonomialBasis rows(nv, blk.spec.variable_subset, blk.spec.order);
    std::vector<int> keep(rows.size(), -1);
    int size = 0;
    for (int i = 0; i < rows.size(); ++i) {
      if (is_free_of_pinned(rows[i])) keep[i] = size++;
    }
    SdpBlock reduced{size, false, {}};
    for (const BlockTerm& t : blk.terms) {
      if (keep[t.row] >= 0 && keep[t.col] >= 0) reduced.terms.push_back({keep[t.row], keep[t.col], t.var, t.coef});
    }
    blocks.push_back(std::move(reduced));
    origin.push_back(static_cast<int>(b));
  }

  // Pivot on terminal moments first: each Liouville row carries exactly one.
  std::vector<int> priority(nvar, 1);
  for (int i = 0; i < tb.size(); ++i) priority[problem.terminal_offset + i] = 0;
  Elimination out = eliminate_equalities(E, f, blocks, problem.objective, problem.objective_offset, priority);
  out.block_origin = origin;

  // Blocks left without variables are constants: verify and drop them.
  StandardSDP& sdp = out.sdp;
  std::vector<SdpBlock> kept;
  std::vector<int> kept_origin;
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const SdpBlock& blk = sdp.blocks[b];
    const bool constant =
        std::all_of(blk.terms.begin(), blk.terms.end(), [](const BlockTerm& t) { return t.var < 0; });
    if (!constant) {
      kept.push_back(blk);
      kept_origin.push_back(out.block_origin[b]);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk.evaluate(Eigen::VectorXd::Zero(sdp.nvar)),
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-9) out.consistent = false;
  }
  if (!kept.empty()) {
    sdp.blocks = std::move(kept);
    out.block_origin = std::move(kept_origin);
  }
  return out;
}

}  // namespace rieszocp
