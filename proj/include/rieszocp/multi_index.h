#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rieszocp {

/// Layout of the joint variable vector (t, z_1..z_N, u_1..u_m).
struct VarLayout {
  int modes{0};
  int controls{0};

  int size() const { return 1 + modes + controls; }
  static constexpr int time() { return 0; }
  int mode(int k) const { return 1 + k; }
  int control(int i) const { return 1 + modes + i; }

  std::vector<int> mode_slots() const;
  std::vector<int> control_slots() const;
  std::vector<int> all_slots() const;

  friend bool operator==(const VarLayout&, const VarLayout&) = default;
};

/// Exponent vector over the joint variables. Slot 0 is t.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int nvars) : exps_(nvars, 0) {}
  explicit MultiIndex(std::vector<int> exps);
  MultiIndex(std::initializer_list<int> exps) : MultiIndex(std::vector<int>(exps)) {}

  static MultiIndex unit(int nvars, int slot, int power = 1);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const;
  int operator[](int slot) const { return exps_[slot]; }
  std::span<const int> exponents() const { return exps_; }

  MultiIndex operator+(const MultiIndex& other) const;
  MultiIndex with(int slot, int power) const;

  // True if every slot outside `slots` has exponent zero.
  bool supported_on(std::span<const int> slots) const;

  std::string str() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order: lower total degree first, then larger
/// exponent in the earlier slot first (t before z_1 before u_1).
struct GlexLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const;
};

/// C(nvars + degree, degree). Throws std::overflow_error instead of wrapping.
std::uint64_t monomial_count(int nvars, int degree);

/// Position of `alpha` among all monomials in alpha.nvars() variables,
/// enumerated in graded lexicographic order.
std::uint64_t glex_rank(const MultiIndex& alpha);

/// Inverse of glex_rank.
MultiIndex glex_unrank(int nvars, std::uint64_t index);

/// The monomials of degree <= max_degree supported on a subset of slots,
/// in graded lexicographic order. Each monomial is a full-length MultiIndex.
class MonomialBasis {
 public:
  MonomialBasis(int nvars, std::vector<int> slots, int max_degree);

  int nvars() const { return nvars_; }
  int max_degree() const { return max_degree_; }
  const std::vector<int>& slots() const { return slots_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const MultiIndex& operator[](int i) const { return monomials_[i]; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }

  // Number of leading monomials with degree <= d.
  int count_up_to(int d) const;

  // -1 when the monomial is not part of the basis.
  int index_of(const MultiIndex& alpha) const;

 private:
  int nvars_;
  std::vector<int> slots_;
  int max_degree_;
  std::vector<MultiIndex> monomials_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> index_;
};

}  // namespace rieszocp
