#include "rieszocp/multi_index.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rieszocp {

std::vector<int> VarLayout::mode_slots() const {
  std::vector<int> s(modes);
  std::iota(s.begin(), s.end(), 1);
  return s;
}

std::vector<int> VarLayout::control_slots() const {
  std::vector<int> s(controls);
  std::iota(s.begin(), s.end(), 1 + modes);
  return s;
}

std::vector<int> VarLayout::all_slots() const {
  std::vector<int> s(size());
  std::iota(s.begin(), s.end(), 0);
  return s;
}

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
  }
}

MultiIndex MultiIndex::unit(int nvars, int slot, int power) {
  MultiIndex m(nvars);
  m.exps_.at(slot) = power;
  return m;
}

int MultiIndex::degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.nvars() != nvars()) throw std::invalid_argument("MultiIndex: arity mismatch");
  MultiIndex r(*this);
  for (int i = 0; i < nvars(); ++i) r.exps_[i] += other.exps_[i];
  return r;
}

MultiIndex MultiIndex::with(int slot, int power) const {
  MultiIndex r(*this);
  r.exps_.at(slot) = power;
  return r;
}

bool MultiIndex::supported_on(std::span<const int> slots) const {
  for (int i = 0; i < nvars(); ++i) {
    if (exps_[i] != 0 && std::find(slots.begin(), slots.end(), i) == slots.end()) return false;
  }
  return true;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < nvars(); ++i) os << (i ? "," : "") << exps_[i];
  os << ')';
  return os.str();
}

bool GlexLess::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  for (int i = 0; i < a.nvars(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const {
  std::size_t h = 1469598103934665603ull;
  for (int e : a.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint64_t monomial_count(int nvars, int degree) {
  if (nvars < 0 || degree < 0) throw std::invalid_argument("monomial_count: negative argument");
  // C(n + d, d) built incrementally; each partial product is itself a binomial.
  std::uint64_t c = 1;
  const int k = std::min(nvars, degree);
  const int n = nvars + degree;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    const std::uint64_t g = std::gcd(c, static_cast<std::uint64_t>(i));
    const std::uint64_t a = c / g;
    const std::uint64_t b = num / (i / g);
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
      throw std::overflow_error("monomial_count: result exceeds 64-bit range");
    }
    c = a * b;
  }
  return c;
}

namespace {

// Number of monomials in `nvars` variables of exact degree d.
std::uint64_t count_exact(int nvars, int d) {
  if (nvars == 0) return d == 0 ? 1 : 0;
  return monomial_count(nvars - 1, d);
}

}  // namespace

std::uint64_t glex_rank(const MultiIndex& alpha) {
  const int n = alpha.nvars();
  int d = alpha.degree();
  std::uint64_t rank = d > 0 ? monomial_count(n, d - 1) : 0;
  // Within one degree, larger exponents in earlier slots come first.
  for (int i = 0; i < n && d > 0; ++i) {
    for (int e = d; e > alpha[i]; --e) rank += count_exact(n - i - 1, d - e);
    d -= alpha[i];
  }
  return rank;
}

MultiIndex glex_unrank(int nvars, std::uint64_t index) {
  int d = 0;
  while (monomial_count(nvars, d) <= index) ++d;
  std::uint64_t rem = index - (d > 0 ? monomial_count(nvars, d - 1) : 0);
  std::vector<int> exps(nvars, 0);
  for (int i = 0; i < nvars; ++i) {
    if (i == nvars - 1) {
      exps[i] = d;
      break;
    }
    for (int e = d; e >= 0; --e) {
      const std::uint64_t block = count_exact(nvars - i - 1, d - e);
      if (rem < block) {
        exps[i] = e;
        d -= e;
        break;
      }
      rem -= block;
    }
  }
  return MultiIndex(std::move(exps));
}

MonomialBasis::MonomialBasis(int nvars, std::vector<int> slots, int max_degree)
    : nvars_(nvars), slots_(std::move(slots)), max_degree_(max_degree) {
  std::sort(slots_.begin(), slots_.end());
  for (int s : slots_) {
    if (s < 0 || s >= nvars_) throw std::invalid_argument("MonomialBasis: slot out of range");
  }
  const int k = static_cast<int>(slots_.size());
  const std::uint64_t count = monomial_count(k, max_degree_);
  monomials_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const MultiIndex local = glex_unrank(k, i);
    MultiIndex full(nvars_);
    for (int j = 0; j < k; ++j) full = full.with(slots_[j], local[j]);
    monomials_.push_back(std::move(full));
  }
  index_.reserve(monomials_.size());
  for (int i = 0; i < size(); ++i) index_.emplace(monomials_[i], i);
}

int MonomialBasis::count_up_to(int d) const {
  if (d < 0) return 0;
  return static_cast<int>(monomial_count(static_cast<int>(slots_.size()), std::min(d, max_degree_)));
}

int MonomialBasis::index_of(const MultiIndex& alpha) const {
  auto it = index_.find(alpha);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace rieszocp
