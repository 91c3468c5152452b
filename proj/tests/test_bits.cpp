#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "localmq/bits.hpp"
#include "localmq/numerics.hpp"
#include "localmq/random.hpp"

using namespace localmq;

TEST(Bits, OneBasedRoundTrip) {
  const Subset s = (1u << 0) | (1u << 4) | (1u << 9);
  EXPECT_EQ(to_one_based(s), (std::vector<int>{1, 5, 10}));
  EXPECT_EQ(from_one_based({1, 5, 10}, 10), s);
  EXPECT_THROW(from_one_based({11}, 10), ContractViolation);
  EXPECT_THROW(from_one_based({0}, 10), ContractViolation);
  EXPECT_THROW(from_one_based({2, 2}, 10), ContractViolation);
}

TEST(Bits, ForEachSubsetVisitsAllInAscendingOrder) {
  const Subset mask = 0b101101;
  std::vector<Subset> seen;
  for_each_subset(mask, [&](Subset s) { seen.push_back(s); });
  EXPECT_EQ(seen.size(), 16u);
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_LT(seen[i - 1], seen[i]);
  for (Subset s : seen) EXPECT_TRUE(is_subset(s, mask));
}

TEST(Bits, ParitySignConvention) {
  // set bit = +1, so chi_S is -1 exactly when an odd number of S-bits are clear.
  EXPECT_EQ(parity_sign(0b11, 0b11), 1.0);
  EXPECT_EQ(parity_sign(0b11, 0b01), -1.0);
  EXPECT_EQ(parity_sign(0b11, 0b00), 1.0);
  EXPECT_EQ(parity_sign(0, 0), 1.0);
}

TEST(Bits, PointBitstringRoundTrip) {
  const Point p(0b1011, 5, Domain::plus_minus);
  EXPECT_EQ(p.bitstring(), "11010");
  EXPECT_EQ(point_from_bitstring("11010", Domain::plus_minus), p);
  EXPECT_EQ(p.value(2), -1.0);
  EXPECT_EQ(Point(0b1011, 5, Domain::zero_one).value(2), 0.0);
  EXPECT_THROW(Point(0b100000, 5, Domain::plus_minus), ContractViolation);
  EXPECT_THROW(point_from_bitstring("10x", Domain::zero_one), ContractViolation);
}

TEST(Bits, HammingDistance) {
  EXPECT_EQ(hamming_distance(0b1010u, 0b0110u), 2);
  EXPECT_THROW(hamming_distance(Point(0, 3, Domain::zero_one), Point(0, 4, Domain::zero_one)), ContractViolation);
}

TEST(Bits, DimensionLimit) {
  EXPECT_NO_THROW(check_dimension(30));
  EXPECT_THROW(check_dimension(31), DimensionTooLarge);
  EXPECT_THROW(check_dimension(21, kMaxEnumerationDimension), DimensionTooLarge);
}

TEST(Random, SplitMixIsDeterministicAndSeedsDiffer) {
  SplitMix64 a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  EXPECT_NE(SplitMix64(7)(), SplitMix64(8)());
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(1, 5), derive_seed(1, 5));
}

TEST(Random, Uniform01Range) {
  SplitMix64 r(3);
  double lo = 1, hi = 0, sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(r);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Random, KeyedPrfIsAFunctionOfKeyAndInput) {
  KeyedPrf f(42), g(42), h(43);
  EXPECT_EQ(f(123), g(123));
  EXPECT_NE(f(123), h(123));
  EXPECT_NE(KeyedPrf(42, 0)(5), KeyedPrf(42, 1)(5));
  // Bits balanced to within 3 sigma.
  int ones = 0;
  const int N = 100000;
  for (int i = 0; i < N; ++i) ones += f.bit(static_cast<std::uint64_t>(i));
  EXPECT_LT(std::abs(ones - N / 2.0), 3 * std::sqrt(N) / 2);
}

TEST(Numerics, CompensatedSumBeatsNaive) {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 1000000; ++i) s += 1e-16;
  EXPECT_NEAR(s.value(), 1.0 + 1e-10, 1e-15);
}

TEST(Numerics, BinomialPmfSumsToOneAndMatchesClosedForm) {
  const auto p = binomial_pmf(10, 0.3);
  double total = 0;
  for (double v : p) total += v;
  EXPECT_NEAR(total, 1.0, 1e-14);
  EXPECT_NEAR(p[3], binomial(10, 3) * std::pow(0.3, 3) * std::pow(0.7, 7), 1e-14);
  EXPECT_EQ(binomial_pmf(4, 0.0)[0], 1.0);
  EXPECT_EQ(binomial_pmf(4, 1.0)[4], 1.0);
  EXPECT_NEAR(log2_binomial(20, 10), std::log2(184756.0), 1e-12);
}
