#pragma once

#include <cmath>
#include <cstddef>

#include "localmq/fourier.hpp"
#include "localmq/numerics.hpp"
#include "localmq/oracles.hpp"
#include "localmq/persistent_noise.hpp"

namespace localmq {

// Pr[Z1 - Z2 = i] for Z1 ~ Bin(k + i, eta), Z2 ~ Bin(k - i, eta): the chance
// that 2k noisy +-1 labels, starting from k + i pluses and k - i minuses,
// sum to zero.
inline double rcn_collision_prob(int k, int i, double eta) {
  if (k < 1) throw ContractViolation("rcn_collision_prob: k must be at least 1");
  if (i < 0 || i > k) throw ContractViolation("rcn_collision_prob: need 0 <= i <= k");
  if (!(eta >= 0.0 && eta < 1.0)) throw ContractViolation("rcn_collision_prob: eta in [0, 1)");
  const auto a = binomial_pmf(k + i, eta);
  const auto b = binomial_pmf(k - i, eta);
  CompensatedSum s;
  for (int j = 0; j <= k - i; ++j)
    s += a[static_cast<std::size_t>(j + i)] * b[static_cast<std::size_t>(j)];
  return s.value();
}

// Closed-form lower bound on p0 - p1 obtained from the symmetric random-walk
// argument: (2 eta - 1)^2 * (2/k) * C(2k-2, k-1) / 4^k.
inline double rcn_gap_lower_bound(int k, double eta) {
  if (k < 1) throw ContractViolation("rcn_gap_lower_bound: k must be at least 1");
  const double lc = log2_binomial(2 * k - 2, k - 1) - 2.0 * k;
  return (2.0 * eta - 1.0) * (2.0 * eta - 1.0) * (2.0 / k) * std::exp2(lc);
}

struct NoisyTestOutcome {
  bool pass = false;
  double estimate = 0;   // q = Pr[f^eta_S != 0]
  double threshold = 0;
  double p0 = 1, p1 = 0;
  std::size_t samples = 0;
};

// Non-zero test on noisy labels: admit iff the noisy non-zero frequency
// clears (1 - p0) + (3/4)(p0 - p1) theta. With eta = 0 this is exactly
// nonzero_test's rule.
inline NoisyTestOutcome noisy_nonzero_test(OracleSession& session, Subset s, double theta,
                                           double eta, std::size_t m,
                                           double zeta = kDefaultZeroTolerance) {
  if (!(eta >= 0.0 && eta < 0.5)) throw ContractViolation("noisy_nonzero_test: eta in [0, 1/2)");
  if (m == 0) throw ContractViolation("noisy_nonzero_test: sample size must be positive");
  NoisyTestOutcome out;
  if (s == 0) {
    out.p0 = 0;
    out.p1 = 0;
  } else {
    const int k = 1 << (set_size(s) - 1);
    out.p0 = rcn_collision_prob(k, 0, eta);
    out.p1 = rcn_collision_prob(k, 1, eta);
  }
  out.threshold = (1.0 - out.p0) + 0.75 * (out.p0 - out.p1) * theta;
  if (s == 0) out.threshold = 0.75 * theta;
  const Basis basis = Basis::uniform();
  std::size_t hits = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto ex = session.draw_example();
    if (std::abs(restriction_value_pm(session, s, ex.index, basis)) > zeta) ++hits;
  }
  out.samples = m;
  out.estimate = static_cast<double>(hits) / static_cast<double>(m);
  out.pass = out.estimate >= out.threshold;
  return out;
}

// Additive noise floor of E[(f^eta_S)^2]: Var of an average of 2^{|S|}
// independent zeta-flipped labels, 4 eta (1 - eta) / 2^{|S|}.
inline double noisy_l2_floor(int set_size_s, double eta) {
  return std::ldexp(4.0 * eta * (1.0 - eta), -set_size_s);
}

struct NoisyL2Estimate {
  double raw = 0;        // mean of (f^eta_S)^2
  double corrected = 0;  // estimate of E[f_S^2]
  std::size_t samples = 0;
};

// Uniform basis only; the floor above assumes equal weights on the 2^{|S|}
// queried points.
inline NoisyL2Estimate noisy_l2_estimate(OracleSession& session, Subset s, double eta,
                                         std::size_t m) {
  if (!(eta >= 0.0 && eta < 0.5)) throw ContractViolation("noisy_l2_estimate: eta in [0, 1/2)");
  if (m == 0) throw ContractViolation("noisy_l2_estimate: sample size must be positive");
  const auto est = sample_restriction(session, s, m, Basis::uniform());
  CompensatedSum acc;
  for (double v : est.values) acc += v * v;
  NoisyL2Estimate out;
  out.samples = m;
  out.raw = acc.value() / static_cast<double>(m);
  const double g = 1.0 - 2.0 * eta;
  out.corrected = (out.raw - noisy_l2_floor(set_size(s), eta)) / (g * g);
  return out;
}

}  // namespace localmq
