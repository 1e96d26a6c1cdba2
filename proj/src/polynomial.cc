#include "rieszocp/polynomial.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rieszocp {

Polynomial::Polynomial(VarLayout layout, double constant) : layout_(layout) {
  add_term(MultiIndex(layout.size()), constant);
}

Polynomial::Polynomial(VarLayout layout, std::vector<std::pair<MultiIndex, double>> terms)
    : layout_(layout) {
  for (auto& [alpha, c] : terms) {
    if (alpha.nvars() != layout_.size()) throw std::invalid_argument("Polynomial: arity mismatch");
    add_term(alpha, c);
  }
}

Polynomial Polynomial::monomial(VarLayout layout, const MultiIndex& alpha, double coef) {
  return Polynomial(layout, {{alpha, coef}});
}

Polynomial Polynomial::variable(VarLayout layout, int slot) {
  return monomial(layout, MultiIndex::unit(layout.size(), slot));
}

void Polynomial::add_term(const MultiIndex& alpha, double coef) {
  if (coef == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(alpha, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::check_same_layout(const Polynomial& other) const {
  if (!(layout_ == other.layout_)) throw std::invalid_argument("Polynomial: layout mismatch");
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.degree());
  return d;
}

double Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? 0.0 : it->second;
}

bool Polynomial::supported_on(std::span<const int> slots) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.supported_on(slots); });
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  check_same_layout(other);
  Polynomial r(*this);
  for (const auto& [alpha, c] : other.terms_) r.add_term(alpha, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const { return *this + other * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_same_layout(other);
  Polynomial r(layout_);
  for (const auto& [a, ca] : terms_) {
    for (const auto& [b, cb] : other.terms_) r.add_term(a + b, ca * cb);
  }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(layout_);
  if (s == 0.0) return r;
  for (const auto& [alpha, c] : terms_) r.add_term(alpha, c * s);
  return r;
}

Polynomial Polynomial::derivative(int slot) const {
  Polynomial r(layout_);
  for (const auto& [alpha, c] : terms_) {
    const int e = alpha[slot];
    if (e == 0) continue;
    r.add_term(alpha.with(slot, e - 1), c * e);
  }
  return r;
}

Polynomial Polynomial::affine_substitute(int slot, double scale, double shift) const {
  Polynomial r(layout_);
  for (const auto& [alpha, c] : terms_) {
    const int e = alpha[slot];
    // (scale x + shift)^e expanded binomially.
    double binom = 1.0;
    for (int k = 0; k <= e; ++k) {
      const double coef = c * binom * std::pow(scale, k) * std::pow(shift, e - k);
      r.add_term(alpha.with(slot, k), coef);
      binom = binom * (e - k) / (k + 1);
    }
  }
  return r;
}

Polynomial Polynomial::evaluate_slot(int slot, double value) const {
  Polynomial r(layout_);
  for (const auto& [alpha, c] : terms_) {
    r.add_term(alpha.with(slot, 0), c * std::pow(value, alpha[slot]));
  }
  return r;
}

double Polynomial::max_abs_difference(const Polynomial& other) const {
  const Polynomial d = *this - other;
  double m = 0.0;
  for (const auto& [alpha, c] : d.terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [alpha, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (int i = 0; i < alpha.nvars(); ++i) {
      if (alpha[i] == 0) continue;
      if (i == 0) {
        os << "*t";
      } else if (i <= layout_.modes) {
        os << "*z" << i;
      } else {
        os << "*u" << (i - layout_.modes);
      }
      if (alpha[i] > 1) os << '^' << alpha[i];
    }
  }
  return os.str();
}

double poly_eval(const Polynomial& p, std::span<const double> point) {
  const int n = p.nvars();
  if (static_cast<int>(point.size()) != n) {
    throw std::invalid_argument("poly_eval: point has length " + std::to_string(point.size()) +
                                ", expected " + std::to_string(n));
  }
  const int d = std::max(p.degree(), 0);
  std::vector<double> powers(static_cast<std::size_t>(n) * (d + 1));
  for (int i = 0; i < n; ++i) {
    powers[i * (d + 1)] = 1.0;
    for (int k = 1; k <= d; ++k) powers[i * (d + 1) + k] = powers[i * (d + 1) + k - 1] * point[i];
  }
  double sum = 0.0;
  for (const auto& [alpha, c] : p.terms()) {
    double term = c;
    for (int i = 0; i < n; ++i) term *= powers[i * (d + 1) + alpha[i]];
    sum += term;
  }
  return sum;
}

}  // namespace rieszocp
