#pragma once

// Arithmetic in GF(2^m) under the polynomial basis, the affine permutation
// family z -> a z + b, and the fixed relabeling maps used to share one
// permutation tuple across all subgraphs.

#include <cstdint>
#include <vector>

namespace ergl {

using FieldElement = std::uint32_t;

constexpr unsigned kMaxFieldDegree = 32;

/// GF(2^m) as GF(2)[t] / (poly). Bit i of `poly` is the coefficient of t^i.
class FieldSpec {
 public:
  /// Validates degree and irreducibility (trial division).
  FieldSpec(unsigned m, std::uint64_t poly);

  /// The embedded low-weight irreducible polynomial for degree m.
  static FieldSpec standard(unsigned m);

  unsigned m() const { return m_; }
  std::uint64_t poly() const { return poly_; }
  std::uint64_t size() const { return std::uint64_t{1} << m_; }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  unsigned m_;
  std::uint64_t poly_;
};

/// Table entry for degree m in [1, 32]; index 0 is unused.
std::uint64_t standard_polynomial(unsigned m);

/// Carry-less product of two binary polynomials of degree < 32.
std::uint64_t clmul(std::uint32_t x, std::uint32_t y);
/// Remainder of a binary polynomial modulo `modulus` (modulus != 0).
std::uint64_t poly_mod(std::uint64_t value, std::uint64_t modulus);
bool is_irreducible(std::uint64_t poly);

FieldElement gf_mul(const FieldSpec& spec, FieldElement x, FieldElement y);
FieldElement gf_pow(const FieldSpec& spec, FieldElement x, std::uint64_t e);
/// x^(2^m - 2); DomainError for x = 0.
FieldElement gf_inv(const FieldSpec& spec, FieldElement x);
/// Extended Euclid over GF(2)[t]; DomainError for x = 0.
FieldElement gf_inv_euclid(const FieldSpec& spec, FieldElement x);

/// pi(x) = phi^{-1}(a phi(x) + b) on ids [1, 2^m], with phi(x) = x - 1.
struct AffinePermutation {
  FieldSpec spec;
  FieldElement a;
  FieldElement b;
  FieldElement a_inv;

  /// DomainError for a = 0; RangeError for a or b outside the field.
  AffinePermutation(const FieldSpec& spec, FieldElement a, FieldElement b);

  friend bool operator==(const AffinePermutation&, const AffinePermutation&) = default;
};

std::uint32_t perm_eval(const AffinePermutation& perm, std::uint32_t id);
std::uint32_t perm_eval_inverse(const AffinePermutation& perm, std::uint32_t id);

/// a uniform over the nonzero elements and b uniform over the field, drawn
/// from the kPermutation stream at counter (index, 0, 0, kPermutation).
AffinePermutation sample_perm(const FieldSpec& spec, std::uint64_t seed, std::uint32_t index = 0);

/// counts[(x1,x2)][(y1,y2)] = #{(a,b) : pi(x1) = y1, pi(x2) = y2} over ordered
/// pairs of distinct elements.
class IndependenceCensus {
 public:
  IndependenceCensus(unsigned m, std::vector<std::uint32_t> counts);

  unsigned m() const { return m_; }
  std::uint32_t field_size() const { return size_; }
  std::uint64_t family_size() const { return std::uint64_t{size_} * (size_ - 1); }
  std::uint64_t cells() const { return counts_.size(); }
  std::uint32_t count(std::uint32_t x1, std::uint32_t x2, std::uint32_t y1, std::uint32_t y2) const;
  std::uint32_t min() const;
  std::uint32_t max() const;
  bool all_ones() const { return min() == 1 && max() == 1; }

  static std::uint64_t ordered_index(std::uint32_t size, std::uint32_t x1, std::uint32_t x2);

 private:
  unsigned m_;
  std::uint32_t size_;
  std::vector<std::uint32_t> counts_;
};

/// Exhaustive census for m in [1, 5]; ParameterError otherwise.
IndependenceCensus independence_census(unsigned m);

/// Relabels S_i u S_j (parts of size n / parts) onto [1, 2n / parts]:
/// the p-th vertex of S_i maps to p and the p-th vertex of S_j to p + n/parts.
class LabelMap {
 public:
  LabelMap(std::uint32_t i, std::uint32_t j, std::uint32_t n, std::uint32_t parts);

  std::uint32_t i() const { return i_; }
  std::uint32_t j() const { return j_; }
  std::uint32_t part_size() const { return part_size_; }
  std::uint32_t local_size() const { return 2 * part_size_; }
  bool contains(std::uint32_t vertex) const;

  std::uint32_t to_local(std::uint32_t vertex) const;
  std::uint32_t to_global(std::uint32_t local) const;

 private:
  std::uint32_t i_, j_, part_size_;
};

std::uint32_t label_map_eval(const LabelMap& map, std::uint32_t vertex);
std::uint32_t label_map_inverse(const LabelMap& map, std::uint32_t local);

}  // namespace ergl
