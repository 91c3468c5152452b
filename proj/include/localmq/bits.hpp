#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "localmq/errors.hpp"

namespace localmq {

inline constexpr int kMaxDimension = 30;
inline constexpr int kMaxEnumerationDimension = 20;

// Bit b of a point encodes x_{b+1}. A set bit is the "high" value: 1 on the
// {0,1} cube and +1 on the {-1,+1} cube.
enum class Domain { zero_one, plus_minus };

inline std::string_view to_string(Domain d) {
  return d == Domain::zero_one ? "zero_one" : "plus_minus";
}

inline Domain domain_from_string(std::string_view s) {
  if (s == "zero_one") return Domain::zero_one;
  if (s == "plus_minus") return Domain::plus_minus;
  throw ContractViolation("unknown domain '" + std::string(s) + "'");
}

// Subsets of [n] are bitmasks; iteration is always in ascending mask order.
using Subset = std::uint32_t;

inline int set_size(Subset s) { return std::popcount(s); }
inline bool contains(Subset s, int i) { return (s >> i) & 1u; }
inline bool is_subset(Subset a, Subset b) { return (a & ~b) == 0; }
inline Subset full_set(int n) {
  return n >= 32 ? ~Subset{0} : ((Subset{1} << n) - 1);
}

inline std::vector<int> elements(Subset s) {
  std::vector<int> out;
  while (s) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

// 1-based variable list, the external (JSON) representation of a subset.
inline std::vector<int> to_one_based(Subset s) {
  auto v = elements(s);
  for (auto& i : v) ++i;
  return v;
}

inline Subset from_one_based(const std::vector<int>& vars, int n) {
  Subset s = 0;
  for (int v : vars) {
    if (v < 1 || v > n)
      throw ContractViolation("variable index " + std::to_string(v) +
                              " outside [1, " + std::to_string(n) + "]");
    if (contains(s, v - 1))
      throw ContractViolation("variable " + std::to_string(v) + " repeated");
    s |= Subset{1} << (v - 1);
  }
  return s;
}

// Visits every subset of `mask` (including empty and mask itself).
template <typename Fn>
void for_each_subset(Subset mask, Fn&& fn) {
  Subset sub = 0;
  while (true) {
    fn(sub);
    if (sub == mask) break;
    sub = (sub - mask) & mask;
  }
}

inline void check_dimension(int n, int limit = kMaxDimension) {
  if (n < 0 || n > limit) throw DimensionTooLarge(n, limit);
}

struct Point {
  std::uint32_t bits = 0;
  int n = 0;
  Domain domain = Domain::plus_minus;

  Point() = default;
  Point(std::uint32_t b, int dim, Domain d) : bits(b), n(dim), domain(d) {
    check_dimension(dim);
    if ((b & ~full_set(dim)) != 0)
      throw ContractViolation("point has bits set beyond dimension");
  }

  bool high(int i) const { return contains(bits, i); }

  // Numeric value of coordinate i in this point's domain.
  double value(int i) const {
    if (domain == Domain::zero_one) return high(i) ? 1.0 : 0.0;
    return high(i) ? 1.0 : -1.0;
  }

  Point flipped(Subset s) const { return Point(bits ^ s, n, domain); }

  // x_1 first, as '0'/'1' characters.
  std::string bitstring() const {
    std::string out(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
      if (high(i)) out[static_cast<std::size_t>(i)] = '1';
    return out;
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.bits == b.bits && a.n == b.n && a.domain == b.domain;
  }
};

inline int hamming_distance(std::uint32_t a, std::uint32_t b) {
  return std::popcount(a ^ b);
}

inline int hamming_distance(const Point& a, const Point& b) {
  if (a.n != b.n) throw ContractViolation("hamming_distance: dimension mismatch");
  return hamming_distance(a.bits, b.bits);
}

inline Point point_from_bitstring(std::string_view s, Domain d) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1')
      bits |= std::uint32_t{1} << i;
    else if (s[i] != '0')
      throw ContractViolation("bitstring may only contain 0 and 1");
  }
  return Point(bits, static_cast<int>(s.size()), d);
}

// chi_S(x) on the +-1 cube under the set-bit = +1 convention.
inline double parity_sign(Subset s, std::uint32_t bits) {
  return (std::popcount(s & ~bits) & 1) ? -1.0 : 1.0;
}

}  // namespace localmq
