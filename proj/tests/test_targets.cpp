#include <gtest/gtest.h>

#include <cmath>

#include "localmq/distributions.hpp"
#include "localmq/generators.hpp"
#include "localmq/targets.hpp"
#include "localmq/verifier.hpp"

using namespace localmq;

namespace {

DecisionTree and_tree() {
  // +1 iff x1 = x2 = +1.
  DecisionTree::Builder b;
  const int neg1 = b.leaf(-1), neg2 = b.leaf(-1), pos = b.leaf(1);
  const int inner = b.split(1, neg2, pos);
  return std::move(b).build(2, Domain::plus_minus, b.split(0, neg1, inner));
}

}  // namespace

TEST(Evaluate, SparsePolynomialOnZeroOne) {
  const SparsePolynomial f(3, Domain::zero_one, {{0b011, 1.0}}, 1, 1.0);
  EXPECT_EQ(evaluate(f, Point(0b011, 3, Domain::zero_one)), 1.0);
  EXPECT_EQ(evaluate(f, Point(0b001, 3, Domain::zero_one)), 0.0);
  const SparsePolynomial zero(3, Domain::zero_one, {}, 1, 1.0);
  for (std::uint32_t x = 0; x < 8; ++x) EXPECT_EQ(evaluate_bits(zero, x), 0.0);
}

TEST(Evaluate, DnfBothTermsFalse) {
  const auto f = DnfFormula::from_literals(3, Domain::plus_minus, {{1, -2}, {3}});
  EXPECT_EQ(evaluate(f, point_from_bitstring("110", Domain::plus_minus)), -1.0);
  EXPECT_EQ(evaluate(f, point_from_bitstring("100", Domain::plus_minus)), 1.0);
  EXPECT_EQ(evaluate(f, point_from_bitstring("001", Domain::plus_minus)), 1.0);
}

TEST(Evaluate, DomainMismatchThrows) {
  const SparsePolynomial f(3, Domain::zero_one, {{0b1, 1.0}}, 1, 1.0);
  EXPECT_THROW(evaluate(f, Point(0, 3, Domain::plus_minus)), ContractViolation);
  EXPECT_THROW(evaluate(f, Point(0, 4, Domain::zero_one)), ContractViolation);
}

TEST(Construct, RejectsBudgetViolations) {
  EXPECT_THROW(SparsePolynomial(3, Domain::zero_one, {{1, 3.0}}, 1, 2.0), ContractViolation);
  EXPECT_THROW(SparsePolynomial(3, Domain::zero_one, {{1, 1.0}, {2, 1.0}}, 1, 2.0), ContractViolation);
  EXPECT_THROW(SparsePolynomial(3, Domain::zero_one, {{8, 1.0}}, 1, 2.0), ContractViolation);
  EXPECT_THROW(DnfFormula::from_literals(3, Domain::plus_minus, {{1, -1}}), ContractViolation);
  EXPECT_THROW(DnfFormula::from_literals(3, Domain::plus_minus, {{4}}), ContractViolation);
  DecisionTree::Builder b;
  EXPECT_THROW(b.leaf(0.5), ContractViolation);
}

TEST(Truncate, DropsHighDegreeTerms) {
  const SparsePolynomial f(3, Domain::zero_one, {{0, 1.0}, {0b111, 5.0}}, 2, 5.0);
  const auto g = truncate_polynomial(f, 2);
  ASSERT_EQ(g.terms().size(), 1u);
  EXPECT_EQ(g.terms()[0].first, 0u);
  EXPECT_EQ(truncate_polynomial(f, 3).terms(), f.terms());
}

TEST(Truncate, PolynomialTailBoundUnderSmoothTable) {
  SplitMix64 rng(21);
  const int n = 12, t = 8, d = 3;
  for (int rep = 0; rep < 10; ++rep) {
    const auto f = random_sparse_polynomial(n, Domain::zero_one, t, 8, 2, rng);
    const auto dist = random_smooth_table(n, Domain::zero_one, 1.5, rng);
    const double a = dist.verify_smoothness();
    const auto g = truncate_polynomial(f, d);
    const double p = dist.exact_event_prob([&](std::uint32_t x) { return f.eval_bits(x) != g.eval_bits(x); });
    EXPECT_LE(p, t * std::pow(a / (1 + a), d) + 1e-12);
  }
}

TEST(Truncate, TreeStructure) {
  SplitMix64 rng(22);
  const auto shallow = random_tree(8, Domain::plus_minus, 4, 2, rng);
  const auto same = truncate_tree(shallow, 5);
  for (std::uint32_t x = 0; x < 256; ++x) EXPECT_EQ(shallow.eval_bits(x), same.eval_bits(x));
  const auto path = random_path_tree(8, Domain::plus_minus, 6, rng);
  EXPECT_EQ(path.depth(), 6);
  EXPECT_EQ(truncate_tree(path, 3).depth(), 3);
}

TEST(Truncate, TreeTailUnderProductMeasure) {
  SplitMix64 rng(23);
  const int n = 12, t = 16;
  const double c = 0.3, tau = 0.05;
  const int d = static_cast<int>(std::ceil(std::log(t / tau) / std::log(1 / (1 - c))));
  for (int rep = 0; rep < 10; ++rep) {
    const auto g = random_tree(n, Domain::plus_minus, t, n, rng);
    const auto dist = Distribution::product(random_means(n, 0.4, rng), Domain::plus_minus);
    const auto h = truncate_tree(g, std::min(d, n));
    const double p = dist.exact_event_prob([&](std::uint32_t x) { return g.eval_bits(x) != h.eval_bits(x); });
    EXPECT_LE(p, tau);
  }
}

TEST(TreeToPolynomial, SmallCases) {
  const auto leaf = DecisionTree::constant(3, Domain::plus_minus, 1);
  const auto s = tree_to_polynomial(leaf, Basis::uniform());
  ASSERT_EQ(s.coeffs.size(), 1u);
  EXPECT_EQ(s.coefficient(0), 1.0);

  DecisionTree::Builder b;
  const int lo = b.leaf(-1), hi = b.leaf(1);
  const auto x1 = std::move(b).build(2, Domain::plus_minus, b.split(0, lo, hi));
  const auto sx = tree_to_polynomial(x1, Basis::uniform());
  ASSERT_EQ(sx.coeffs.size(), 1u);
  EXPECT_DOUBLE_EQ(sx.coefficient(1), 1.0);
}

TEST(TreeToPolynomial, AndTreeMatchesHadamardOfTruthTable) {
  const auto g = and_tree();
  const auto s = tree_to_polynomial(g, Basis::uniform());
  EXPECT_DOUBLE_EQ(s.coefficient(0b00), -0.5);
  EXPECT_DOUBLE_EQ(s.coefficient(0b01), 0.5);
  EXPECT_DOUBLE_EQ(s.coefficient(0b10), 0.5);
  EXPECT_DOUBLE_EQ(s.coefficient(0b11), 0.5);
  const auto table = verify::table_of([&](std::uint32_t x) { return g.eval_bits(x); }, 2);
  const auto ref = verify::naive_transform(table, 2, Basis::uniform());
  for (Subset S = 0; S < 4; ++S) EXPECT_DOUBLE_EQ(s.coefficient(S), ref[S]);
}

TEST(TreeToPolynomial, AgreesWithReferenceInEveryBasis) {
  SplitMix64 rng(24);
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 9;
    const auto g = random_tree(n, Domain::plus_minus, 12, 5, rng);
    const auto mu = random_means(n, 0.5, rng);
    const auto table = verify::table_of([&](std::uint32_t x) { return g.eval_bits(x); }, n);
    for (const Basis& basis : {Basis::uniform(), Basis::product(mu)}) {
      const auto fast = tree_to_polynomial(g, basis);
      const auto ref = verify::naive_transform(table, n, basis);
      for (Subset S = 0; S < ref.size(); ++S) EXPECT_NEAR(fast.coefficient(S), ref[S], 1e-12);
    }
    // Same truth table read as a multilinear polynomial over {0,1}.
    const auto mono = tree_to_polynomial(g, Basis::monomial());
    const auto ref = verify::naive_transform(table, n, Basis::monomial());
    for (Subset S = 0; S < ref.size(); ++S) EXPECT_NEAR(mono.coefficient(S), ref[S], 1e-12);
  }
}

TEST(TargetJson, RoundTrip) {
  SplitMix64 rng(25);
  const std::vector<TargetFunction> fs{random_sparse_polynomial(10, Domain::zero_one, 5, 3, 2, rng),
                                       random_tree(10, Domain::plus_minus, 7, 4, rng),
                                       random_dnf(10, Domain::plus_minus, 3, 3, rng)};
  for (const auto& f : fs) {
    const auto j = to_json(f);
    const auto back = target_from_json(j);
    EXPECT_EQ(to_json(back).dump(), j.dump());
    for (std::uint32_t x = 0; x < 1024; ++x) EXPECT_EQ(evaluate_bits(back, x), evaluate_bits(f, x));
  }
}

TEST(Generators, DeterministicAndWithinBudget) {
  SplitMix64 a(26), b(26);
  EXPECT_EQ(to_json(TargetFunction(random_dnf(14, Domain::plus_minus, 4, 3, a))).dump(),
            to_json(TargetFunction(random_dnf(14, Domain::plus_minus, 4, 3, b))).dump());
  SplitMix64 rng(27);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = random_sparse_polynomial(16, Domain::zero_one, 6, 4, 2, rng);
    EXPECT_EQ(f.terms().size(), 6u);
    EXPECT_LE(f.degree(), 4);
    for (const auto& [s, c] : f.terms()) EXPECT_TRUE(c != 0 && std::abs(c) <= 2 && c == std::round(c));
    const auto g = random_tree(16, Domain::plus_minus, 10, 4, rng);
    EXPECT_LE(g.leaf_count(), 10);
    EXPECT_LE(g.depth(), 4);
  }
}
