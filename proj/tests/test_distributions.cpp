#include <gtest/gtest.h>

#include <cmath>

#include "localmq/distributions.hpp"
#include "localmq/generators.hpp"
#include "localmq/random.hpp"

using namespace localmq;

namespace {

// Independent neighbour scan for the tightest alpha.
double brute_alpha(const std::vector<double>& p, int n) {
  double a = 1;
  for (std::uint32_t x = 0; x < p.size(); ++x)
    for (int i = 0; i < n; ++i) {
      const double q = p[x ^ (1u << i)];
      a = std::max(a, p[x] / q);
    }
  return a;
}

}  // namespace

TEST(Smoothness, UniformIsOne) {
  for (int n : {1, 5, 20}) EXPECT_EQ(Distribution::uniform(n, Domain::plus_minus).verify_smoothness(), 1.0);
}

TEST(Smoothness, ProductRatio) {
  const auto d = Distribution::product_from_high_probs({0.6, 0.4}, Domain::zero_one);
  EXPECT_NEAR(d.verify_smoothness(), 1.5, 1e-12);
}

TEST(Smoothness, TableMatchesBruteForceScan) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SplitMix64 rng(seed);
    const auto d = random_smooth_table(8, Domain::zero_one, 1.0 + uniform01(rng), rng);
    EXPECT_NEAR(d.verify_smoothness(), brute_alpha(d.table_probs(), 8), 1e-12);
  }
}

TEST(Smoothness, GeneratorHitsRequestedAlpha) {
  SplitMix64 rng(11);
  const auto d = random_smooth_table(10, Domain::zero_one, 1.5, rng);
  EXPECT_LE(d.verify_smoothness(), 1.5 + 1e-9);
  EXPECT_GT(d.verify_smoothness(), 1.0);
}

TEST(Distribution, RejectsBadTables) {
  EXPECT_THROW(Distribution::table(2, Domain::zero_one, {0.5, 0.5, 0.1, 0.0}), ContractViolation);
  EXPECT_THROW(Distribution::table(2, Domain::zero_one, {0.5, 0.5}), ContractViolation);
  EXPECT_THROW(Distribution::table(1, Domain::zero_one, {-0.5, 1.5}), ContractViolation);
  EXPECT_THROW(Distribution::product({1.0}, Domain::plus_minus), ContractViolation);
  EXPECT_THROW(Distribution::product_from_high_probs({0.0}, Domain::zero_one), ContractViolation);
}

TEST(Sampling, UniformBitMeans) {
  const auto d = Distribution::uniform(10, Domain::plus_minus);
  SplitMix64 rng(1);
  std::vector<int> ones(10);
  const int N = 100000;
  for (int j = 0; j < N; ++j) {
    const auto x = d.sample(rng);
    for (int i = 0; i < 10; ++i) ones[static_cast<std::size_t>(i)] += contains(x, i);
  }
  for (int c : ones) EXPECT_NEAR(static_cast<double>(c) / N, 0.5, 0.02);
}

TEST(Sampling, ProductBitMeans) {
  const auto d = Distribution::product_from_high_probs({0.9, 0.1}, Domain::zero_one);
  SplitMix64 rng(2);
  int a = 0, b = 0;
  const int N = 100000;
  for (int j = 0; j < N; ++j) {
    const auto x = d.sample(rng);
    a += contains(x, 0);
    b += contains(x, 1);
  }
  EXPECT_NEAR(static_cast<double>(a) / N, 0.9, 0.02);
  EXPECT_NEAR(static_cast<double>(b) / N, 0.1, 0.02);
}

TEST(Sampling, TableFrequenciesWithinThreeSigma) {
  SplitMix64 rng(3);
  const auto d = random_smooth_table(6, Domain::zero_one, 2.0, rng);
  const int N = 200000;
  std::vector<int> hist(64);
  for (int j = 0; j < N; ++j) ++hist[d.sample(rng)];
  int outside = 0;
  for (std::uint32_t x = 0; x < 64; ++x) {
    const double p = d.prob(x);
    if (std::abs(hist[x] - N * p) > 3 * std::sqrt(N * p * (1 - p))) ++outside;
  }
  // 64 cells at 3 sigma: expect well under one miss on average.
  EXPECT_LE(outside, 2);
}

TEST(Sampling, Deterministic) {
  SplitMix64 a(9), b(9);
  const auto d = Distribution::product({0.2, -0.3, 0.1}, Domain::plus_minus);
  for (int j = 0; j < 100; ++j) EXPECT_EQ(d.sample(a), d.sample(b));
}

TEST(EventProb, Basics) {
  const auto u = Distribution::uniform(6, Domain::plus_minus);
  EXPECT_NEAR(u.exact_event_prob([](std::uint32_t) { return true; }), 1.0, 1e-15);
  EXPECT_NEAR(u.exact_event_prob([](std::uint32_t x) { return contains(x, 0); }), 0.5, 1e-15);
}

TEST(EventProb, PatternBoundsOnSmoothTable) {
  SplitMix64 rng(4);
  const auto d = random_smooth_table(10, Domain::zero_one, 1.5, rng);
  const double a = d.verify_smoothness();
  for (int rep = 0; rep < 20; ++rep) {
    const Subset s = random_subset(10, 3, rng);
    const auto b = static_cast<std::uint32_t>(uniform_below(rng, 1024)) & s;
    const double p = d.exact_event_prob([&](std::uint32_t x) { return (x & s) == b; });
    EXPECT_GE(p, std::pow(1 / (1 + a), 3) - 1e-12);
    EXPECT_LE(p, std::pow(a / (1 + a), 3) + 1e-12);
  }
}

TEST(Conditional, UniformStaysUniform) {
  const auto d = Distribution::uniform(8, Domain::plus_minus).conditional_marginal(0b101, 0b001);
  EXPECT_EQ(d.kind(), DistKind::uniform);
  EXPECT_EQ(d.dimension(), 6);
}

TEST(Conditional, ProductKeepsRemainingMeans) {
  const auto d = Distribution::product({0.1, -0.2, 0.3}, Domain::plus_minus).conditional_marginal(0b1, 0b1);
  ASSERT_EQ(d.dimension(), 2);
  EXPECT_NEAR(d.means()[0], -0.2, 1e-12);
  EXPECT_NEAR(d.means()[1], 0.3, 1e-12);
}

TEST(Conditional, TableStaysSmoothAndMatchesBayes) {
  SplitMix64 rng(5);
  const auto d = random_smooth_table(8, Domain::zero_one, 1.7, rng);
  const double a = d.verify_smoothness();
  const Subset s = 0b10010;
  const std::uint32_t b = 0b00010;
  const auto c = d.conditional_marginal(s, b);
  EXPECT_LE(c.verify_smoothness(), a + 1e-9);
  const double mass = d.exact_event_prob([&](std::uint32_t x) { return (x & s) == b; });
  const std::vector<int> keep = elements(full_set(8) & ~s);
  for (std::uint32_t x = 0; x < 256; ++x) {
    if ((x & s) != b) continue;
    EXPECT_NEAR(c.prob(Distribution::pack(x, keep)), d.prob(x) / mass, 1e-12);
  }
  EXPECT_LE(d.marginal(s).verify_smoothness(), a + 1e-9);
}

TEST(Mixture, OfSmoothTablesIsSmooth) {
  SplitMix64 rng(6);
  const auto a = random_smooth_table(7, Domain::zero_one, 1.4, rng);
  const auto b = random_smooth_table(7, Domain::zero_one, 1.4, rng);
  const auto m = mixture({a, b}, {0.3, 0.7});
  EXPECT_LE(m.verify_smoothness(), std::max(a.verify_smoothness(), b.verify_smoothness()) + 1e-9);
  EXPECT_NEAR(m.prob(5), 0.3 * a.prob(5) + 0.7 * b.prob(5), 1e-14);
}

TEST(DistributionJson, RoundTrip) {
  SplitMix64 rng(7);
  for (const auto& d : {Distribution::uniform(5, Domain::zero_one),
                        Distribution::product({0.1, -0.4, 0.2}, Domain::plus_minus),
                        random_smooth_table(5, Domain::plus_minus, 1.3, rng)}) {
    const auto back = distribution_from_json(to_json(d));
    EXPECT_EQ(back.kind(), d.kind());
    for (std::uint32_t x = 0; x < (1u << d.dimension()); ++x) EXPECT_NEAR(back.prob(x), d.prob(x), 1e-15);
  }
}
