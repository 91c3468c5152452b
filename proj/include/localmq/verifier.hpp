#pragma once

// Brute-force reference computations used by the test suites and the lemma
// checks. Nothing here calls into the estimators or the fast transforms in
// fourier.hpp; the point is to have a second, slow, obviously-correct path.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "localmq/bits.hpp"
#include "localmq/distributions.hpp"
#include "localmq/errors.hpp"
#include "localmq/spectrum.hpp"

namespace localmq::verify {

inline constexpr int kMaxNaiveDimension = 12;

// Probability of x under the reference measure of a basis: uniform for the
// +-1 and {0,1} bases, the product measure with the basis means otherwise.
inline double reference_weight(const Basis& basis, int n, std::uint32_t x) {
  if (basis.kind != BasisKind::product_mu) return std::ldexp(1.0, -n);
  double w = 1.0;
  for (int i = 0; i < n; ++i) {
    const double mu = basis.means[static_cast<std::size_t>(i)];
    w *= ((x >> i) & 1u) ? (1.0 + mu) / 2.0 : (1.0 - mu) / 2.0;
  }
  return w;
}

// Single basis function written out from its definition.
inline double basis_function(const Basis& basis, Subset s, std::uint32_t x) {
  double v = 1.0;
  for (int i = 0; s >> i; ++i) {
    if (!((s >> i) & 1u)) continue;
    const bool hi = (x >> i) & 1u;
    switch (basis.kind) {
      case BasisKind::uniform_pm: v *= hi ? 1.0 : -1.0; break;
      case BasisKind::monomial_01: v *= hi ? 1.0 : 0.0; break;
      case BasisKind::product_mu: {
        const double mu = basis.means[static_cast<std::size_t>(i)];
        v *= ((hi ? 1.0 : -1.0) - mu) / std::sqrt(1.0 - mu * mu);
        break;
      }
    }
  }
  return v;
}

// One coefficient by direct summation. For the orthonormal bases this is the
// inner product <f, phi_S>; for monomials it is Moebius inversion over the
// subsets of S.
inline double naive_coefficient(const std::vector<double>& table, int n, const Basis& basis, Subset s) {
  if (basis.kind == BasisKind::monomial_01) {
    double c = 0;
    for_each_subset(s, [&](Subset t) { c += ((set_size(s) - set_size(t)) & 1 ? -1.0 : 1.0) * table[t]; });
    return c;
  }
  double c = 0;
  for (std::uint32_t x = 0; x < table.size(); ++x)
    c += reference_weight(basis, n, x) * basis_function(basis, s, x) * table[x];
  return c;
}

// Every coefficient by direct summation, O(4^n).
inline std::vector<double> naive_transform(const std::vector<double>& table, int n, const Basis& basis) {
  check_dimension(n, kMaxNaiveDimension);
  if (table.size() != (std::size_t{1} << n)) throw ContractViolation("naive_transform: table size is not 2^n");
  std::vector<double> out(table.size());
  for (std::uint32_t s = 0; s < out.size(); ++s) out[s] = naive_coefficient(table, n, basis, s);
  return out;
}

// Coefficients by recursion on the top variable: f = f0 on x_top low, f1 on
// high; the coefficient of S without top comes from the averaged function and
// with top from the weighted difference. Any basis, O(n 2^n).
inline std::vector<double> recursive_transform(const std::vector<double>& table, int n, const Basis& basis) {
  if (n == 0) return table;
  const std::size_t half = std::size_t{1} << (n - 1);
  std::vector<double> lo(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<double> hi(table.begin() + static_cast<std::ptrdiff_t>(half), table.end());
  Basis sub = basis;
  if (basis.kind == BasisKind::product_mu) sub.means.resize(static_cast<std::size_t>(n - 1));
  const auto a = recursive_transform(lo, n - 1, sub);
  const auto b = recursive_transform(hi, n - 1, sub);
  std::vector<double> out(table.size());
  const int top = n - 1;
  for (std::size_t s = 0; s < half; ++s) {
    switch (basis.kind) {
      case BasisKind::uniform_pm:
        out[s] = (a[s] + b[s]) / 2.0;
        out[s + half] = (b[s] - a[s]) / 2.0;
        break;
      case BasisKind::monomial_01:
        out[s] = a[s];
        out[s + half] = b[s] - a[s];
        break;
      case BasisKind::product_mu: {
        const double mu = basis.means[static_cast<std::size_t>(top)];
        const double pl = (1.0 - mu) / 2.0, ph = (1.0 + mu) / 2.0, sd = std::sqrt(1.0 - mu * mu);
        out[s] = pl * a[s] + ph * b[s];
        out[s + half] = pl * (-1.0 - mu) / sd * a[s] + ph * (1.0 - mu) / sd * b[s];
        break;
      }
    }
  }
  return out;
}

inline std::vector<double> table_of(const std::function<double(std::uint32_t)>& f, int n) {
  check_dimension(n, kMaxEnumerationDimension);
  std::vector<double> v(std::size_t{1} << n);
  for (std::uint32_t x = 0; x < v.size(); ++x) v[x] = f(x);
  return v;
}

// E[f^2] under the basis' reference measure.
inline double second_moment(const std::vector<double>& table, int n, const Basis& basis) {
  double m = 0;
  for (std::uint32_t x = 0; x < table.size(); ++x) m += reference_weight(basis, n, x) * table[x] * table[x];
  return m;
}

// Restriction from a coefficient map: f_S(x) = sum_{T >= S} c_T phi_{T\S}(x).
inline double symbolic_restriction(const std::map<Subset, double>& coeffs, const Basis& basis, Subset s,
                                   std::uint32_t x) {
  double v = 0;
  for (const auto& [t, c] : coeffs)
    if ((t & s) == s) v += c * basis_function(basis, t & ~s, x);
  return v;
}

// Restriction straight from the truth table, by summing over the 2^{|S|}
// settings of x_S. Uniform: average of chi_S f. Product: mu-weighted average
// of chi^mu_S f. Monomial: the signed sum, i.e. the coefficient of x^S.
inline double restriction_from_table(const std::vector<double>& table, const Basis& basis, Subset s,
                                     std::uint32_t x) {
  double v = 0;
  const std::uint32_t base = x & ~s;
  for_each_subset(s, [&](Subset y) {
    const double fx = table[base | y];
    switch (basis.kind) {
      case BasisKind::uniform_pm:
        v += std::ldexp(basis_function(basis, s, base | y), -set_size(s)) * fx;
        break;
      case BasisKind::monomial_01:
        v += ((set_size(s) - set_size(y)) & 1 ? -1.0 : 1.0) * fx;
        break;
      case BasisKind::product_mu: {
        double w = 1.0;
        for (int i : elements(s)) {
          const double mu = basis.means[static_cast<std::size_t>(i)];
          w *= contains(y, i) ? (1.0 + mu) / 2.0 : (1.0 - mu) / 2.0;
        }
        v += w * basis_function(basis, s, base | y) * fx;
        break;
      }
    }
  });
  return v;
}

// Pr_D[g(x) != 0] by enumeration, with |g| <= zeta counted as zero.
inline double nonzero_probability(const Distribution& d, const std::function<double(std::uint32_t)>& g,
                                  double zeta = 1e-9) {
  return d.exact_event_prob([&](std::uint32_t x) { return std::abs(g(x)) > zeta; });
}

inline double disagreement(const Distribution& d, const std::function<double(std::uint32_t)>& f,
                           const std::function<double(std::uint32_t)>& g) {
  return d.exact_event_prob([&](std::uint32_t x) { return f(x) != g(x); });
}

// Gram matrix deviation max |<phi_S, phi_T> - [S = T]| under the reference
// measure, by enumeration.
inline double orthonormality_residual(const Basis& basis, int n) {
  check_dimension(n, 10);
  const std::size_t N = std::size_t{1} << n;
  std::vector<std::vector<double>> phi(N, std::vector<double>(N));
  std::vector<double> w(N);
  for (std::uint32_t x = 0; x < N; ++x) {
    w[x] = reference_weight(basis, n, x);
    for (std::uint32_t s = 0; s < N; ++s) phi[s][x] = basis_function(basis, s, x);
  }
  double worst = 0;
  for (std::size_t s = 0; s < N; ++s)
    for (std::size_t t = s; t < N; ++t) {
      double g = 0;
      for (std::size_t x = 0; x < N; ++x) g += w[x] * phi[s][x] * phi[t][x];
      worst = std::max(worst, std::abs(g - (s == t ? 1.0 : 0.0)));
    }
  return worst;
}

}  // namespace localmq::verify
