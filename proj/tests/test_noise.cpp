#include <gtest/gtest.h>

#include <cmath>

#include "localmq/generators.hpp"
#include "localmq/noise.hpp"
#include "localmq/verifier.hpp"

using namespace localmq;

namespace {

// Enumerates every flip pattern of k + i pluses and k - i minuses.
double collision_by_enumeration(int k, int i, double eta) {
  const int len = 2 * k;
  double total = 0;
  for (std::uint32_t flips = 0; flips < (1u << len); ++flips) {
    int sum = 0;
    double p = 1;
    for (int j = 0; j < len; ++j) {
      const int clean = j < k + i ? 1 : -1;
      const bool f = (flips >> j) & 1u;
      sum += f ? -clean : clean;
      p *= f ? eta : 1 - eta;
    }
    if (sum == 0) total += p;
  }
  return total;
}

}  // namespace

TEST(Collision, NoiselessCases) {
  for (int k : {1, 2, 8}) {
    EXPECT_DOUBLE_EQ(rcn_collision_prob(k, 0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(rcn_collision_prob(k, 1, 0.0), 0.0);
  }
}

TEST(Collision, SinglePair) {
  for (double eta : {0.05, 0.2, 0.45}) {
    EXPECT_NEAR(rcn_collision_prob(1, 0, eta), eta * eta + (1 - eta) * (1 - eta), 1e-15);
    EXPECT_NEAR(rcn_collision_prob(1, 1, eta), 2 * eta * (1 - eta), 1e-15);
  }
}

TEST(Collision, MatchesEnumeration) {
  for (int k : {1, 2, 3, 4, 6})
    for (int i = 0; i <= k; ++i)
      for (double eta : {0.1, 0.3})
        EXPECT_NEAR(rcn_collision_prob(k, i, eta), collision_by_enumeration(k, i, eta), 1e-12)
            << "k=" << k << " i=" << i;
}

TEST(Collision, DecreasesInImbalance) {
  for (double eta : {0.05, 0.25, 0.4})
    for (int i = 0; i < 8; ++i) EXPECT_GT(rcn_collision_prob(8, i, eta), rcn_collision_prob(8, i + 1, eta));
}

TEST(Collision, GapLowerBoundHolds) {
  for (int k = 1; k <= 32; k *= 2)
    for (double eta : {0.0, 0.1, 0.25, 0.4, 0.49}) {
      const double gap = rcn_collision_prob(k, 0, eta) - rcn_collision_prob(k, 1, eta);
      EXPECT_LE(rcn_gap_lower_bound(k, eta), gap + 1e-15) << "k=" << k << " eta=" << eta;
    }
  EXPECT_THROW(rcn_collision_prob(2, 3, 0.1), ContractViolation);
  EXPECT_THROW(rcn_collision_prob(0, 0, 0.1), ContractViolation);
}

TEST(NoisyNonzero, ZeroNoiseMatchesCleanTest) {
  SplitMix64 rng(41);
  const auto g = random_tree(10, Domain::plus_minus, 8, 3, rng);
  const auto d = Distribution::uniform(10, Domain::plus_minus);
  for (Subset s : {Subset{0b1}, Subset{0b110}, Subset{0b1000000000}}) {
    OracleSession a(g, d, 3, 5), b(g, d, 3, 5);
    const auto noisy = noisy_nonzero_test(a, s, 0.2, 0.0, 400);
    const auto clean = nonzero_test(b, s, 0.2, kDefaultZeroTolerance, 400, Basis::uniform(), false);
    EXPECT_EQ(noisy.estimate, clean.estimate);
    EXPECT_EQ(noisy.pass, clean.pass);
    EXPECT_DOUBLE_EQ(noisy.threshold, clean.threshold);
  }
}

TEST(NoisyNonzero, IdenticallyZeroRestrictionSeesOnlyNoise) {
  // A variable the tree never reads has f_{i} = 0, so only disagreeing
  // flips make the noisy restriction nonzero.
  SplitMix64 rng(42);
  // n = 18 keeps repeated points, whose flips are shared, rare.
  const auto g = random_tree(18, Domain::plus_minus, 6, 3, rng);
  Subset used = 0;
  for (const auto& p : g.paths()) used |= p.vars;
  const int idle = elements(full_set(18) & ~used).front();
  const double eta = 0.2;
  OracleSession s(g, Distribution::uniform(18, Domain::plus_minus), 1, 6, NoiseWrapper(eta, 7));
  const auto out = noisy_nonzero_test(s, Subset{1} << idle, 0.3, eta, 20000);
  EXPECT_NEAR(out.estimate, 1 - out.p0, 0.015);
  EXPECT_FALSE(out.pass);
}

TEST(NoisyL2, Floor) {
  EXPECT_EQ(noisy_l2_floor(3, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(noisy_l2_floor(0, 0.25), 0.75);
  EXPECT_DOUBLE_EQ(noisy_l2_floor(2, 0.1), 4 * 0.1 * 0.9 / 4);
}

TEST(NoisyL2, CorrectedEstimateTracksTailWeight) {
  SplitMix64 rng(43);
  const int n = 12;
  const double eta = 0.15;
  const auto g = random_tree(n, Domain::plus_minus, 10, 4, rng);
  const auto fhat = verify::recursive_transform(verify::table_of([&](std::uint32_t x) { return g.eval_bits(x); }, n),
                                                n, Basis::uniform());
  OracleSession s(g, Distribution::uniform(n, Domain::plus_minus), 3, 8, NoiseWrapper(eta, 9));
  const auto paths = g.paths();
  for (int j = 0; j < 12; ++j) {
    Subset S = 0;
    for (int i : elements(paths[uniform_below(rng, paths.size())].vars))
      if (set_size(S) < 3 && uniform_below(rng, 2)) S |= Subset{1} << i;
    if (j % 3 == 0) S = random_subset(n, 2, rng);
    double exact = 0;
    for (Subset T = 0; T < fhat.size(); ++T)
      if ((T & S) == S) exact += fhat[T] * fhat[T];
    const auto est = noisy_l2_estimate(s, S, eta, 20000);
    EXPECT_NEAR(est.corrected, exact, 0.04) << "S mask " << S;
  }
}
