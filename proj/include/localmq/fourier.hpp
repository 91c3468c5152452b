#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "localmq/bits.hpp"
#include "localmq/distributions.hpp"
#include "localmq/oracles.hpp"
#include "localmq/spectrum.hpp"
#include "localmq/targets.hpp"

namespace localmq {

inline constexpr double kDefaultZeroTolerance = 1e-10;

// All 2^n values of f, indexed by the bit pattern.
inline std::vector<double> truth_table(const TargetFunction& f) {
  const int n = dimension(f);
  check_dimension(n, kMaxEnumerationDimension);
  std::vector<double> v(std::size_t{1} << n);
  for (std::uint32_t x = 0; x < v.size(); ++x) v[x] = evaluate_bits(f, x);
  return v;
}

// In-place unnormalised Walsh-Hadamard transform (natural ordering).
inline void fwht(std::vector<double>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1)
    for (std::size_t i = 0; i < a.size(); i += h << 1)
      for (std::size_t j = i; j < i + h; ++j) {
        const double u = a[j], w = a[j + h];
        a[j] = u + w;
        a[j + h] = u - w;
      }
}

// Coefficients of a truth table in the requested basis, as a dense vector
// indexed by subset mask.
inline std::vector<double> dense_transform(std::vector<double> v, int n, const Basis& basis) {
  const std::size_t N = std::size_t{1} << n;
  if (v.size() != N) throw ContractViolation("dense_transform: table size is not 2^n");
  switch (basis.kind) {
    case BasisKind::uniform_pm: {
      fwht(v);
      // With bit 1 = +1 the plain transform yields (-1)^{|S|} f^(S) after the
      // index flip below; sum_x chi_S(x) f(x) with chi_S = (-1)^{|S \ x|}.
      std::vector<double> out(N);
      const double scale = std::ldexp(1.0, -n);
      for (std::size_t s = 0; s < N; ++s)
        out[s] = ((std::popcount(static_cast<std::uint32_t>(s)) & 1) ? -v[s] : v[s]) * scale;
      return out;
    }
    case BasisKind::monomial_01: {
      // Moebius inversion: c_S = sum_{T subset S} (-1)^{|S \ T|} f(1_T).
      for (int i = 0; i < n; ++i)
        for (std::size_t x = 0; x < N; ++x)
          if ((x >> i) & 1u) v[x] -= v[x ^ (std::size_t{1} << i)];
      return v;
    }
    case BasisKind::product_mu: {
      if (static_cast<int>(basis.means.size()) != n)
        throw ContractViolation("product basis has the wrong number of means");
      // Coordinate-wise: low slot <- E over x_i, high slot <- E[x_i-factor].
      for (int i = 0; i < n; ++i) {
        const double mu = basis.means[static_cast<std::size_t>(i)];
        const double ph = (1.0 + mu) / 2.0, pl = (1.0 - mu) / 2.0;
        const double fh = basis.factor(i, true), fl = basis.factor(i, false);
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t x = 0; x < N; ++x) {
          if (x & bit) continue;
          const double lo = v[x], hi = v[x | bit];
          v[x] = pl * lo + ph * hi;
          v[x | bit] = pl * fl * lo + ph * fh * hi;
        }
      }
      return v;
    }
  }
  return v;
}

inline FourierSpectrum exact_transform_table(const std::vector<double>& table, int n,
                                             const Basis& basis,
                                             double zeta = kDefaultZeroTolerance) {
  check_dimension(n, kMaxEnumerationDimension);
  const auto dense = dense_transform(table, n, basis);
  FourierSpectrum out{n, basis, {}};
  for (std::size_t s = 0; s < dense.size(); ++s)
    if (std::abs(dense[s]) > zeta) out.coeffs.emplace_hint(out.coeffs.end(), static_cast<Subset>(s), dense[s]);
  return out;
}

inline FourierSpectrum exact_transform(const TargetFunction& f, const Basis& basis,
                                       double zeta = kDefaultZeroTolerance) {
  if (basis.domain() != domain_of(f))
    throw ContractViolation("exact_transform: basis domain does not match the target");
  return exact_transform_table(truth_table(f), dimension(f), basis, zeta);
}

// ---------------------------------------------------------------------------
// Restrictions through local queries.

// f_S(x_{S-bar}) = sum over settings of x_S of prod_{i in S}(2x_i - 1) f(x)
// on the {0,1} cube; 2^{|S|} queries anchored at the example.
inline double restriction_value_01(OracleSession& session, Subset s, std::size_t anchor) {
  if (session.domain() != Domain::zero_one)
    throw ContractViolation("restriction_value_01 needs a {0,1} session");
  const std::uint32_t base = session.example_point(anchor) & ~s;
  const int k = set_size(s);
  double acc = 0;
  for_each_subset(s, [&](Subset sub) {
    const double y = session.local_query(base | sub, anchor);
    acc += ((k - set_size(sub)) & 1) ? -y : y;
  });
  return acc;
}

// Uniform: average of chi_S(x) f(x) over all flips of x_S. Product: the
// mu_S-weighted average of chi^mu_S(x) f(x) over the same points.
inline double restriction_value_pm(OracleSession& session, Subset s, std::size_t anchor,
                                   const Basis& basis) {
  if (session.domain() != Domain::plus_minus)
    throw ContractViolation("restriction_value_pm needs a +-1 session");
  const std::uint32_t base = session.example_point(anchor) & ~s;
  if (basis.kind == BasisKind::uniform_pm) {
    double acc = 0;
    for_each_subset(s, [&](Subset sub) {
      acc += parity_sign(s, sub) * session.local_query(base | sub, anchor);
    });
    return std::ldexp(acc, -set_size(s));
  }
  if (basis.kind != BasisKind::product_mu)
    throw ContractViolation("restriction_value_pm: basis must be uniform_pm or product_mu");
  if (static_cast<int>(basis.means.size()) != session.dimension())
    throw ContractViolation("product basis has the wrong number of means");
  double acc = 0;
  for_each_subset(s, [&](Subset sub) {
    double w = 1.0;
    for (Subset r = s; r; r &= r - 1) {
      const int i = std::countr_zero(r);
      const double mu = basis.means[static_cast<std::size_t>(i)];
      const bool hi = contains(sub, i);
      w *= (hi ? (1.0 + mu) : (1.0 - mu)) / 2.0 * basis.factor(i, hi);
    }
    acc += w * session.local_query(base | sub, anchor);
  });
  return acc;
}

// Dispatch on the basis: monomial_01 -> {0,1} restriction, otherwise +-1.
inline double restriction_value(OracleSession& session, Subset s, std::size_t anchor,
                                const Basis& basis) {
  if (basis.kind == BasisKind::monomial_01) return restriction_value_01(session, s, anchor);
  return restriction_value_pm(session, s, anchor, basis);
}

struct RestrictionEstimate {
  Subset set = 0;
  std::vector<double> values;
  std::vector<std::size_t> anchors;
  std::size_t sample_size = 0;
};

// f_S at m fresh natural examples.
inline RestrictionEstimate sample_restriction(OracleSession& session, Subset s, std::size_t m,
                                              const Basis& basis) {
  RestrictionEstimate est;
  est.set = s;
  est.sample_size = m;
  est.values.reserve(m);
  est.anchors.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ex = session.draw_example();
    est.anchors.push_back(ex.index);
    est.values.push_back(restriction_value(session, s, ex.index, basis));
  }
  return est;
}

// ---------------------------------------------------------------------------
// Tests. Both decide at 3/4 of the target value so that, with estimation
// accuracy of a quarter of it, admitted sets have exact value >= 1/2 of the
// target and sets at or above the target are admitted.

struct TestOutcome {
  bool pass = false;
  double estimate = 0;   // mean over the examples actually drawn
  double threshold = 0;
  std::size_t samples = 0;       // examples drawn
  std::size_t planned = 0;       // m
};

// ceil(range^2 ln(2/delta) / (2 accuracy^2)).
inline double hoeffding_sample_size(double range, double accuracy, double delta) {
  if (!(accuracy > 0) || !(delta > 0 && delta < 1))
    throw ContractViolation("hoeffding_sample_size: need accuracy > 0 and delta in (0,1)");
  return std::ceil(range * range * std::log(2.0 / delta) / (2.0 * accuracy * accuracy));
}

namespace detail {
// Averages a nonnegative per-example statistic over up to m fresh examples.
// The sum only grows, so once it reaches threshold * m the full-sample
// decision is already "pass" and drawing stops.
template <typename Stat>
TestOutcome monotone_test(OracleSession& session, std::size_t m, double threshold, Stat&& stat,
                          bool stop_early) {
  if (m == 0) throw ContractViolation("test sample size must be positive");
  TestOutcome out;
  out.threshold = threshold;
  out.planned = m;
  const double target = threshold * static_cast<double>(m);
  CompensatedSum acc;
  std::size_t used = 0;
  for (; used < m; ++used) {
    const auto ex = session.draw_example();
    acc += stat(ex.index);
    if (stop_early && acc.value() >= target && used + 1 < m) {
      ++used;
      out.pass = true;
      break;
    }
  }
  out.samples = used;
  out.estimate = acc.value() / static_cast<double>(used);
  if (used == m) out.pass = acc.value() / static_cast<double>(m) >= threshold;
  return out;
}
}  // namespace detail

// Admits S when the mean of f_S^2 reaches (3/4) theta^2.
inline TestOutcome l2_test(OracleSession& session, Subset s, double theta, std::size_t m,
                           const Basis& basis, bool stop_early = true) {
  return detail::monotone_test(
      session, m, 0.75 * theta * theta,
      [&](std::size_t a) {
        const double v = restriction_value(session, s, a, basis);
        return v * v;
      },
      stop_early);
}

// Admits S when the fraction of examples with |f_S| > zeta reaches (3/4) theta.
inline TestOutcome nonzero_test(OracleSession& session, Subset s, double theta, double zeta,
                                std::size_t m, const Basis& basis, bool stop_early = true) {
  return detail::monotone_test(
      session, m, 0.75 * theta,
      [&](std::size_t a) { return std::abs(restriction_value(session, s, a, basis)) > zeta ? 1.0 : 0.0; },
      stop_early);
}

}  // namespace localmq
