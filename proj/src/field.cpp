#include "ergl/field.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "ergl/error.hpp"
#include "ergl/philox.hpp"

namespace ergl {
namespace {

// Low-weight irreducible trinomials/pentanomials, one per degree.
constexpr std::array<std::uint64_t, kMaxFieldDegree + 1> kStandardPolynomials = {
    0x0,          // unused
    0x3,          // t + 1
    0x7,          // t^2 + t + 1
    0xB,          // t^3 + t + 1
    0x13,         // t^4 + t + 1
    0x25,         // t^5 + t^2 + 1
    0x43,         // t^6 + t + 1
    0x83,         // t^7 + t + 1
    0x11B,        // t^8 + t^4 + t^3 + t + 1
    0x211,        // t^9 + t^4 + 1
    0x409,        // t^10 + t^3 + 1
    0x805,        // t^11 + t^2 + 1
    0x1009,       // t^12 + t^3 + 1
    0x201B,       // t^13 + t^4 + t^3 + t + 1
    0x4021,       // t^14 + t^5 + 1
    0x8003,       // t^15 + t + 1
    0x1002B,      // t^16 + t^5 + t^3 + t + 1
    0x20009,      // t^17 + t^3 + 1
    0x40081,      // t^18 + t^7 + 1
    0x80027,      // t^19 + t^5 + t^2 + t + 1
    0x100009,     // t^20 + t^3 + 1
    0x200005,     // t^21 + t^2 + 1
    0x400003,     // t^22 + t + 1
    0x800021,     // t^23 + t^5 + 1
    0x100001B,    // t^24 + t^4 + t^3 + t + 1
    0x2000009,    // t^25 + t^3 + 1
    0x400001B,    // t^26 + t^4 + t^3 + t + 1
    0x8000027,    // t^27 + t^5 + t^2 + t + 1
    0x10000009,   // t^28 + t^3 + 1
    0x20000005,   // t^29 + t^2 + 1
    0x40000003,   // t^30 + t + 1
    0x80000009,   // t^31 + t^3 + 1
    0x10000008D,  // t^32 + t^7 + t^3 + t^2 + 1
};

// Degrees above this are trusted from the table at construction time and
// checked exhaustively by the unit tests instead.
constexpr unsigned kSelfTestDegree = 20;

int degree(std::uint64_t poly) { return poly == 0 ? -1 : 63 - std::countl_zero(poly); }

}  // namespace

std::uint64_t standard_polynomial(unsigned m) {
  if (m < 1 || m > kMaxFieldDegree) throw ParameterError("field degree must lie in [1, 32]");
  return kStandardPolynomials[m];
}

std::uint64_t clmul(std::uint32_t x, std::uint32_t y) {
  std::uint64_t product = 0;
  std::uint64_t shifted = x;
  while (y != 0) {
    if (y & 1u) product ^= shifted;
    shifted <<= 1;
    y >>= 1;
  }
  return product;
}

std::uint64_t poly_mod(std::uint64_t value, std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("poly_mod: zero modulus");
  const int dm = degree(modulus);
  for (int dv = degree(value); dv >= dm; dv = degree(value)) value ^= modulus << (dv - dm);
  return value;
}

bool is_irreducible(std::uint64_t poly) {
  const int d = degree(poly);
  if (d < 1) return false;
  for (int k = 1; k <= d / 2; ++k) {
    for (std::uint64_t divisor = std::uint64_t{1} << k; divisor < (std::uint64_t{2} << k); ++divisor) {
      if (poly_mod(poly, divisor) == 0) return false;
    }
  }
  return true;
}

FieldSpec::FieldSpec(unsigned m, std::uint64_t poly) : m_(m), poly_(poly) {
  if (m < 1 || m > kMaxFieldDegree) throw ParameterError("field degree must lie in [1, 32]");
  if (degree(poly) != static_cast<int>(m)) {
    throw ParameterError("polynomial degree does not match m = " + std::to_string(m));
  }
  if ((m <= kSelfTestDegree || poly != kStandardPolynomials[m]) && !is_irreducible(poly)) {
    throw ParameterError("polynomial is reducible over GF(2)");
  }
}

FieldSpec FieldSpec::standard(unsigned m) { return FieldSpec(m, standard_polynomial(m)); }

FieldElement gf_mul(const FieldSpec& spec, FieldElement x, FieldElement y) {
  return static_cast<FieldElement>(poly_mod(clmul(x, y), spec.poly()));
}

FieldElement gf_pow(const FieldSpec& spec, FieldElement x, std::uint64_t e) {
  FieldElement result = 1;
  FieldElement base = x;
  while (e != 0) {
    if (e & 1u) result = gf_mul(spec, result, base);
    base = gf_mul(spec, base, base);
    e >>= 1;
  }
  return result;
}

FieldElement gf_inv(const FieldSpec& spec, FieldElement x) {
  if (x == 0) throw DomainError("gf_inv: zero has no inverse");
  if (x >= spec.size()) throw RangeError("gf_inv: element outside the field");
  return gf_pow(spec, x, spec.size() - 2);
}

FieldElement gf_inv_euclid(const FieldSpec& spec, FieldElement x) {
  if (x == 0) throw DomainError("gf_inv_euclid: zero has no inverse");
  if (x >= spec.size()) throw RangeError("gf_inv_euclid: element outside the field");
  // Invariant: g1 * x = u and g2 * x = v (mod poly).
  std::uint64_t u = x, v = spec.poly(), g1 = 1, g2 = 0;
  while (u != 1) {
    int shift = degree(u) - degree(v);
    if (shift < 0) {
      std::swap(u, v);
      std::swap(g1, g2);
      shift = -shift;
    }
    u ^= v << shift;
    g1 ^= g2 << shift;
  }
  return static_cast<FieldElement>(poly_mod(g1, spec.poly()));
}

AffinePermutation::AffinePermutation(const FieldSpec& field, FieldElement a_, FieldElement b_)
    : spec(field), a(a_), b(b_), a_inv(0) {
  if (a >= spec.size() || b >= spec.size()) throw RangeError("affine permutation: coefficient outside the field");
  if (a == 0) throw DomainError("affine permutation: a must be nonzero");
  a_inv = gf_inv(spec, a);
}

std::uint32_t perm_eval(const AffinePermutation& perm, std::uint32_t id) {
  if (id < 1 || id > perm.spec.size()) throw RangeError("perm_eval: id outside [1, 2^m]");
  return (gf_mul(perm.spec, perm.a, id - 1) ^ perm.b) + 1;
}

std::uint32_t perm_eval_inverse(const AffinePermutation& perm, std::uint32_t id) {
  if (id < 1 || id > perm.spec.size()) throw RangeError("perm_eval_inverse: id outside [1, 2^m]");
  return gf_mul(perm.spec, perm.a_inv, (id - 1) ^ perm.b) + 1;
}

AffinePermutation sample_perm(const FieldSpec& spec, std::uint64_t seed, std::uint32_t index) {
  const PhiloxBlock block =
      philox4x32({index, 0, 0, static_cast<std::uint32_t>(StreamTag::kPermutation)}, philox_key(seed));
  const std::uint64_t size = spec.size();
  const auto a = static_cast<FieldElement>(1 + scale64(join64(block[0], block[1]), size - 1));
  const auto b = static_cast<FieldElement>(scale64(join64(block[2], block[3]), size));
  return AffinePermutation(spec, a, b);
}

IndependenceCensus::IndependenceCensus(unsigned m, std::vector<std::uint32_t> counts)
    : m_(m), size_(std::uint32_t{1} << m), counts_(std::move(counts)) {
  const std::uint64_t ordered = std::uint64_t{size_} * (size_ - 1);
  if (counts_.size() != ordered * ordered) throw ParameterError("census table has the wrong size");
}

std::uint64_t IndependenceCensus::ordered_index(std::uint32_t size, std::uint32_t x1, std::uint32_t x2) {
  return std::uint64_t{x1} * (size - 1) + (x2 < x1 ? x2 : x2 - 1);
}

std::uint32_t IndependenceCensus::count(std::uint32_t x1, std::uint32_t x2, std::uint32_t y1,
                                        std::uint32_t y2) const {
  if (x1 == x2 || y1 == y2 || std::max({x1, x2, y1, y2}) >= size_) {
    throw RangeError("census cell requires distinct elements of the field");
  }
  const std::uint64_t ordered = std::uint64_t{size_} * (size_ - 1);
  return counts_[ordered_index(size_, x1, x2) * ordered + ordered_index(size_, y1, y2)];
}

std::uint32_t IndependenceCensus::min() const { return *std::min_element(counts_.begin(), counts_.end()); }
std::uint32_t IndependenceCensus::max() const { return *std::max_element(counts_.begin(), counts_.end()); }

IndependenceCensus independence_census(unsigned m) {
  if (m < 1 || m > 5) throw ParameterError("independence_census: exhaustive census limited to m in [1, 5]");
  const FieldSpec spec = FieldSpec::standard(m);
  const std::uint32_t size = std::uint32_t{1} << m;
  const std::uint64_t ordered = std::uint64_t{size} * (size - 1);
  std::vector<std::uint32_t> counts(ordered * ordered, 0);
  std::vector<FieldElement> image(size);
  for (FieldElement a = 1; a < size; ++a) {
    for (FieldElement b = 0; b < size; ++b) {
      for (FieldElement z = 0; z < size; ++z) image[z] = gf_mul(spec, a, z) ^ b;
      for (FieldElement x1 = 0; x1 < size; ++x1) {
        for (FieldElement x2 = 0; x2 < size; ++x2) {
          if (x1 == x2) continue;
          ++counts[IndependenceCensus::ordered_index(size, x1, x2) * ordered +
                   IndependenceCensus::ordered_index(size, image[x1], image[x2])];
        }
      }
    }
  }
  return IndependenceCensus(m, std::move(counts));
}

LabelMap::LabelMap(std::uint32_t i, std::uint32_t j, std::uint32_t n, std::uint32_t parts)
    : i_(i), j_(j), part_size_(0) {
  if (parts < 2 || n % parts != 0) throw ParameterError("LabelMap: n must split into parts >= 2 equal parts");
  if (!(1 <= i && i < j && j <= parts)) throw ParameterError("LabelMap: need 1 <= i < j <= parts");
  part_size_ = n / parts;
}

bool LabelMap::contains(std::uint32_t vertex) const {
  const auto in_part = [&](std::uint32_t part) {
    return vertex > (part - 1) * part_size_ && vertex <= part * part_size_;
  };
  return in_part(i_) || in_part(j_);
}

std::uint32_t LabelMap::to_local(std::uint32_t vertex) const {
  if (vertex > (i_ - 1) * part_size_ && vertex <= i_ * part_size_) return vertex - (i_ - 1) * part_size_;
  if (vertex > (j_ - 1) * part_size_ && vertex <= j_ * part_size_) {
    return vertex - (j_ - 1) * part_size_ + part_size_;
  }
  throw DomainError("LabelMap: vertex " + std::to_string(vertex) + " outside S_i u S_j");
}

std::uint32_t LabelMap::to_global(std::uint32_t local) const {
  if (local < 1 || local > 2 * part_size_) throw RangeError("LabelMap: local id out of range");
  return local <= part_size_ ? (i_ - 1) * part_size_ + local : (j_ - 1) * part_size_ + local - part_size_;
}

std::uint32_t label_map_eval(const LabelMap& map, std::uint32_t vertex) { return map.to_local(vertex); }
std::uint32_t label_map_inverse(const LabelMap& map, std::uint32_t local) { return map.to_global(local); }

}  // namespace ergl
