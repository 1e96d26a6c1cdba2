#include "rieszocp/relaxation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace rieszocp {

AffineMap AffineMap::onto_unit(Interval from) {
  const double hw = from.half_width();
  if (!(hw > 0.0) || !std::isfinite(hw)) {
    throw std::invalid_argument("cannot rescale a degenerate or unbounded interval [" + std::to_string(from.lo) +
                                ", " + std::to_string(from.hi) + "]");
  }
  return {1.0 / hw, -from.center() / hw};
}

VariableScaling VariableScaling::identity(VarLayout layout) {
  return {layout, std::vector<AffineMap>(layout.size())};
}

Polynomial VariableScaling::to_internal(const Polynomial& physical) const {
  Polynomial p = physical;
  for (int s = 0; s < layout.size(); ++s) {
    const AffineMap& m = maps[s];
    if (m.scale == 1.0 && m.shift == 0.0) continue;
    p = p.affine_substitute(s, 1.0 / m.scale, -m.shift / m.scale);
  }
  return p;
}

Polynomial VariableScaling::to_physical(const Polynomial& internal) const {
  Polynomial p = internal;
  for (int s = 0; s < layout.size(); ++s) {
    const AffineMap& m = maps[s];
    if (m.scale == 1.0 && m.shift == 0.0) continue;
    p = p.affine_substitute(s, m.scale, m.shift);
  }
  return p;
}

namespace {

bool is_ball_witness(const Polynomial& w, int m) {
  const VarLayout L = ControlSet::layout(m);
  const double M = w.coefficient(MultiIndex(L.size()));
  if (!(M > 0.0)) return false;
  int quad_terms = 0;
  double scale = 0.0;
  for (const auto& [alpha, c] : w.terms()) {
    if (alpha.degree() == 0) continue;
    if (alpha.degree() != 2) return false;
    bool pure_square = false;
    for (int i = 0; i < m; ++i) pure_square = pure_square || alpha[L.control(i)] == 2;
    if (!pure_square) return false;
    if (scale == 0.0) scale = c;
    if (!(c < 0.0) || c != scale) return false;
    ++quad_terms;
  }
  return quad_terms == m;
}

}  // namespace

ControlSet::ControlSet(int m, std::vector<Polynomial> constraints, std::optional<std::vector<Interval>> box)
    : m_(m), constraints_(std::move(constraints)), box_(std::move(box)) {
  if (m_ < 1) throw std::invalid_argument("ControlSet: control dimension must be >= 1");
  const VarLayout L = layout(m_);
  for (const Polynomial& w : constraints_) {
    if (!(w.layout() == L)) throw std::invalid_argument("ControlSet: constraint has the wrong layout");
    const std::vector<int> slots = L.control_slots();
    if (!w.supported_on(slots)) throw std::invalid_argument("ControlSet: constraint depends on t");
  }
  if (box_ && static_cast<int>(box_->size()) != m_) throw std::invalid_argument("ControlSet: box has wrong length");
  const bool has_witness =
      std::any_of(constraints_.begin(), constraints_.end(), [&](const Polynomial& w) { return is_ball_witness(w, m_); });
  if (!has_witness) {
    if (!box_) throw std::invalid_argument("ControlSet: no ball constraint M - |u|^2 and no box to derive one");
    double radius2 = 0.0;
    for (const Interval& iv : *box_) radius2 += std::max(iv.lo * iv.lo, iv.hi * iv.hi);
    Polynomial witness(L, radius2);
    for (int i = 0; i < m_; ++i) witness = witness - Polynomial::monomial(L, MultiIndex::unit(L.size(), L.control(i), 2));
    constraints_.push_back(witness);
  }
}

ControlSet ControlSet::box(std::vector<Interval> box) {
  const int m = static_cast<int>(box.size());
  const VarLayout L = layout(m);
  std::vector<Polynomial> cons;
  for (int i = 0; i < m; ++i) {
    if (!(box[i].lo < box[i].hi)) throw std::invalid_argument("ControlSet: empty control interval");
    const Polynomial u = Polynomial::variable(L, L.control(i));
    cons.push_back((Polynomial(L, box[i].hi) - u) * (u - Polynomial(L, box[i].lo)));
  }
  return ControlSet(m, std::move(cons), std::move(box));
}

Polynomial embed_time_control(const Polynomial& p, VarLayout joint) {
  const VarLayout& src = p.layout();
  if (src.modes != 0 || src.controls != joint.controls) {
    throw std::invalid_argument("embed_time_control: expected a polynomial in (t, u) with matching control count");
  }
  std::vector<std::pair<MultiIndex, double>> terms;
  for (const auto& [alpha, c] : p.terms()) {
    MultiIndex full(joint.size());
    full = full.with(0, alpha[0]);
    for (int i = 0; i < joint.controls; ++i) full = full.with(joint.control(i), alpha[src.control(i)]);
    terms.emplace_back(full, c);
  }
  return Polynomial(joint, std::move(terms));
}

double MomentVector::at(const MultiIndex& alpha) const {
  const int i = basis->index_of(alpha);
  if (i < 0) throw std::out_of_range("MomentVector: moment " + alpha.str() + " not in the truncation");
  return values(i);
}

double MomentVector::apply(const Polynomial& theta) const {
  double s = 0.0;
  for (const auto& [alpha, c] : theta.terms()) s += c * at(alpha);
  return s;
}

MomentVector MomentVector::to_physical() const {
  MomentVector out = *this;
  const VarLayout L = scaling.layout;
  for (int i = 0; i < basis->size(); ++i) {
    const Polynomial mono = Polynomial::monomial(L, (*basis)[i]);
    out.values(i) = apply(scaling.to_internal(mono));
  }
  out.scaling = VariableScaling::identity(L);
  return out;
}

MomentVector marginal(const MomentVector& y, std::vector<int> subset) {
  for (int s : subset) {
    if (std::find(y.slots().begin(), y.slots().end(), s) == y.slots().end()) {
      throw std::invalid_argument("marginal: slot " + std::to_string(s) + " is not a variable of the measure");
    }
  }
  MomentVector out;
  out.tag = y.tag;
  out.scaling = y.scaling;
  out.basis = std::make_shared<MonomialBasis>(y.nvars(), std::move(subset), y.degree());
  out.values.resize(out.basis->size());
  for (int i = 0; i < out.basis->size(); ++i) out.values(i) = y.at((*out.basis)[i]);
  return out;
}

Eigen::MatrixXd AffineBlock::realize(const Eigen::VectorXd& v) const {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size, size);
  for (const BlockTerm& t : terms) {
    const double val = t.coef * (t.var < 0 ? 1.0 : v(t.var));
    M(t.row, t.col) += val;
    if (t.row != t.col) M(t.col, t.row) += val;
  }
  return M;
}

int SDPProblem::state_monomial_count() const {
  return static_cast<int>(monomial_count(modes, 2 * order));
}

std::vector<int> SDPProblem::block_sizes() const {
  std::vector<int> s;
  for (const auto& b : blocks) s.push_back(b.size);
  return s;
}

MomentVector SDPProblem::occupation(const Eigen::VectorXd& v) const {
  return {MeasureTag::Occupation, occupation_basis, scaling, v.segment(occupation_offset, occupation_basis->size())};
}

MomentVector SDPProblem::terminal(const Eigen::VectorXd& v) const {
  return {MeasureTag::Terminal, terminal_basis, scaling, v.segment(terminal_offset, terminal_basis->size())};
}

int minimal_order(const ControlSet& controls, const Polynomial& cost) {
  int r = 1;
  for (const Polynomial& w : controls.constraints()) r = std::max(r, (w.degree() + 1) / 2);
  r = std::max(r, (cost.degree() + 1) / 2);
  return r;
}

namespace {

class BlockBuilder {
 public:
  BlockBuilder(const SDPProblem& p) : p_(p) {}

  AffineBlock build(std::string label, MeasureTag measure, const Polynomial& theta, int order,
                    std::vector<int> slots) const {
    const MonomialBasis& target = measure == MeasureTag::Occupation ? *p_.occupation_basis : *p_.terminal_basis;
    const int offset = measure == MeasureTag::Occupation ? p_.occupation_offset : p_.terminal_offset;
    const MonomialBasis rows(p_.layout.size(), slots, order);
    std::map<std::tuple<int, int, int>, double> acc;
    for (int a = 0; a < rows.size(); ++a) {
      for (int b = a; b < rows.size(); ++b) {
        const MultiIndex ab = rows[a] + rows[b];
        for (const auto& [delta, c] : theta.terms()) {
          const int idx = target.index_of(delta + ab);
          if (idx < 0) throw std::logic_error("localizing matrix exceeds the moment truncation");
          acc[{a, b, offset + idx}] += c;
        }
      }
    }
    AffineBlock blk;
    blk.spec = {std::move(label), measure, theta, order, std::move(slots)};
    blk.size = rows.size();
    blk.terms.reserve(acc.size());
    for (const auto& [key, c] : acc) {
      if (c == 0.0) continue;
      blk.terms.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
    }
    return blk;
  }

 private:
  const SDPProblem& p_;
};

SDPProblem build(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                 const RelaxationOptions& options, bool free_time) {
  const int N = sys.dimension();
  const int m = sys.controls();
  if (controls.dimension() != m) throw std::invalid_argument("relaxation: control set dimension mismatch");
  if (!(cost.layout() == ControlSet::layout(m))) {
    throw std::invalid_argument("relaxation: cost must be a polynomial in (t, u) only");
  }
  const int r_min = minimal_order(controls, cost);
  if (r < r_min) {
    throw std::invalid_argument("relaxation order r=" + std::to_string(r) + " is below r_min=" + std::to_string(r_min));
  }

  SDPProblem p;
  p.modes = N;
  p.controls = m;
  p.order = r;
  p.horizon = sys.horizon();
  p.layout = {N, m};
  const VarLayout& L = p.layout;
  const int nv = L.size();
  p.test_degree = options.test_degree == TestDegree::TwoR ? 2 * r : r;

  // Internal coordinates: t and every z_k mapped onto [-1, 1].
  p.scaling = VariableScaling::identity(L);
  const auto window = [&](int slot, Interval fallback) {
    const auto& w = options.scaling_windows;
    if (slot < static_cast<int>(w.size()) && w[slot]) {
      if (!(w[slot]->hi > w[slot]->lo)) throw std::invalid_argument("scaling window must have positive width");
      return *w[slot];
    }
    return fallback;
  };
  if (static_cast<int>(options.scaling_windows.size()) > N + 1) {
    throw std::invalid_argument("more scaling windows than time and state slots");
  }
  p.scaling.maps[0] = AffineMap::onto_unit(window(0, {0.0, sys.horizon().T}));
  for (int k = 0; k < N; ++k) {
    p.scaling.maps[L.mode(k)] = AffineMap::onto_unit(window(L.mode(k), sys.state_bounds()[k]));
  }

  AffineField f = AffineField::zero(L);
  f.time_rate = p.scaling.time().scale;
  for (int k = 0; k < N; ++k) {
    const AffineMap& mk = p.scaling.maps[L.mode(k)];
    for (int j = 0; j < N; ++j) {
      const AffineMap& mj = p.scaling.maps[L.mode(j)];
      f.drift(k, j) = mk.scale * sys.drift()(k, j) / mj.scale;
      f.offset(k) -= mk.scale * sys.drift()(k, j) * mj.shift / mj.scale;
    }
    for (int i = 0; i < m; ++i) f.input(k, i) = mk.scale * sys.input()(k, i);
  }
  p.internal_field = f;

  std::vector<int> term_slots = L.mode_slots();
  if (free_time) term_slots.insert(term_slots.begin(), 0);
  p.occupation_basis = std::make_shared<MonomialBasis>(nv, L.all_slots(), 2 * r);
  p.terminal_basis = std::make_shared<MonomialBasis>(nv, term_slots, 2 * r);
  p.occupation_offset = 0;
  p.terminal_offset = p.occupation_basis->size();
  const int nvar = p.occupation_basis->size() + p.terminal_basis->size();

  const BlockBuilder bb(p);
  const Polynomial one(L, 1.0);
  const auto var = [&](int slot) { return Polynomial::variable(L, slot); };
  // (hi - x)(x - lo) >= 0 for a physical interval, in internal coordinates.
  const auto interval_localizer = [&](int slot, Interval physical) {
    const AffineMap& mp = p.scaling.maps[slot];
    const double lo = mp.apply(physical.lo), hi = mp.apply(physical.hi);
    const Polynomial x = var(slot);
    return (Polynomial(L, hi) - x) * (x - Polynomial(L, lo));
  };
  const Interval horizon_window{0.0, sys.horizon().T};

  p.blocks.push_back(bb.build("moment occupation", MeasureTag::Occupation, one, r, L.all_slots()));
  p.blocks.push_back(bb.build("moment terminal", MeasureTag::Terminal, one, r, term_slots));
  p.blocks.push_back(bb.build("time occupation", MeasureTag::Occupation, interval_localizer(0, horizon_window), r - 1, {0}));
  for (int k = 0; k < N; ++k) {
    p.blocks.push_back(bb.build("state z" + std::to_string(k + 1), MeasureTag::Occupation,
                                interval_localizer(L.mode(k), sys.state_bounds()[k]), r - 1, {L.mode(k)}));
  }
  for (std::size_t j = 0; j < controls.constraints().size(); ++j) {
    const Polynomial w = embed_time_control(controls.constraints()[j], L);
    const int rj = (w.degree() + 1) / 2;
    p.blocks.push_back(bb.build("control w" + std::to_string(j + 1), MeasureTag::Occupation, w, r - rj,
                                L.control_slots()));
  }
  for (int k = 0; k < N; ++k) {
    const AffineMap& mk = p.scaling.maps[L.mode(k)];
    const Interval tb = sys.terminal_bounds()[k];
    const double lo = mk.apply(tb.lo), hi = mk.apply(tb.hi);
    p.terminal_bounds_internal.push_back({lo, hi});
    const Polynomial z = var(L.mode(k));
    const Polynomial vT = (Polynomial(L, hi) - z) * (z - Polynomial(L, lo));
    p.blocks.push_back(bb.build("terminal z" + std::to_string(k + 1), MeasureTag::Terminal, vT, r - 1, term_slots));
  }
  if (free_time) {
    p.blocks.push_back(bb.build("time terminal", MeasureTag::Terminal, interval_localizer(0, horizon_window), r - 1, {0}));
  }

  // Liouville rows: l_{yT}(g at the terminal time) - l_y(L g) = g(0, z0).
  std::vector<int> test_slots = L.mode_slots();
  test_slots.insert(test_slots.begin(), 0);
  const MonomialBasis tests(nv, test_slots, p.test_degree);
  std::vector<double> init(nv, 0.0);
  init[0] = p.scaling.time().apply(0.0);
  for (int k = 0; k < N; ++k) init[L.mode(k)] = p.scaling.maps[L.mode(k)].apply(sys.z0()(k));

  std::vector<Eigen::Triplet<double>> trips;
  p.rhs.resize(tests.size());
  for (int row = 0; row < tests.size(); ++row) {
    const MultiIndex& g = tests[row];
    p.test_monomials.push_back(g);
    // For a fixed horizon the terminal time is a known constant.
    const MultiIndex gT = free_time ? g : g.with(0, 0);
    const double tT = free_time ? 1.0 : std::pow(p.scaling.time().apply(sys.horizon().T), g[0]);
    trips.emplace_back(row, p.terminal_offset + p.terminal_basis->index_of(gT), tT);
    const Polynomial Lg = liouville_apply(Polynomial::monomial(L, g), f);
    for (const auto& [gamma, c] : Lg.terms()) {
      trips.emplace_back(row, p.occupation_offset + p.occupation_basis->index_of(gamma), -c);
    }
    p.rhs(row) = poly_eval(Polynomial::monomial(L, g), init);
  }
  p.equalities.resize(tests.size(), nvar);
  p.equalities.setFromTriplets(trips.begin(), trips.end());
  p.equalities.prune(0.0);

  p.objective = Eigen::VectorXd::Zero(nvar);
  const Polynomial h = p.scaling.to_internal(embed_time_control(cost, L));
  for (const auto& [gamma, c] : h.terms()) p.objective(p.occupation_offset + p.occupation_basis->index_of(gamma)) += c;
  return p;
}

}  // namespace

std::vector<std::optional<Interval>> conditioning_windows(const ModalSystem& sys, const ControlSet& controls,
                                                          double time_extent) {
  const int N = sys.dimension();
  std::vector<std::optional<Interval>> windows(N + 1);
  if (time_extent > 0.0) windows[0] = Interval{0.0, std::min(time_extent, sys.horizon().T)};
  if (!controls.box_bounds()) return windows;
  double umax2 = 0.0;
  for (const Interval& iv : *controls.box_bounds()) {
    const double a = std::max(std::abs(iv.lo), std::abs(iv.hi));
    umax2 += a * a;
  }
  const double umax = std::sqrt(umax2);
  const double T = sys.horizon().T;
  for (const ModeBlock& blk : sys.blocks()) {
    const Eigen::MatrixXd D = sys.drift().block(blk.first, blk.first, blk.size, blk.size);
    const Eigen::MatrixXd Dsym = 0.5 * (D + D.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dsym, Eigen::EigenvaluesOnly);
    const double mu = es.eigenvalues().maxCoeff();  // logarithmic norm
    const double z0 = sys.z0().segment(blk.first, blk.size).norm();
    const double gain = sys.input().middleRows(blk.first, blk.size).norm() * umax;
    // |z(t)| <= e^{mu t} |z0| + gain * int_0^t e^{mu s} ds, maximized over [0, T].
    const double integral = std::abs(mu) < 1e-12 ? T : (mu > 0 ? std::expm1(mu * T) / mu : std::min(T, -1.0 / mu));
    const double w = (mu > 0 ? std::exp(mu * T) : 1.0) * z0 + gain * integral;
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    for (int k = blk.first; k < blk.first + blk.size; ++k) {
      const Interval& sb = sys.state_bounds()[k];
      const Interval iv{std::max(-w, sb.lo), std::min(w, sb.hi)};
      if (iv.hi > iv.lo) windows[k + 1] = iv;
    }
  }
  return windows;
}

SDPProblem build_fixed_time(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                            const RelaxationOptions& options) {
  if (sys.horizon().is_free()) throw std::invalid_argument("build_fixed_time: system has a free horizon");
  return build(sys, controls, cost, r, options, false);
}

SDPProblem build_free_time(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                           const RelaxationOptions& options) {
  if (!sys.horizon().is_free()) throw std::invalid_argument("build_free_time: system has a fixed horizon");
  return build(sys, controls, cost, r, options, true);
}

SDPProblem build_relaxation(const ModalSystem& sys, const ControlSet& controls, const Polynomial& cost, int r,
                            const RelaxationOptions& options) {
  return build(sys, controls, cost, r, options, sys.horizon().is_free());
}

}  // namespace rieszocp
