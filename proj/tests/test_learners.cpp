#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "localmq/eta_search.hpp"
#include "localmq/fourier.hpp"
#include "localmq/generators.hpp"
#include "localmq/learners.hpp"
#include "localmq/verifier.hpp"

using namespace localmq;

namespace {

double exact_error(const LearnOutcome& out, const TargetFunction& f, const Distribution& d) {
  return verify::disagreement(
      d, [&](std::uint32_t x) { return out.predict(x); }, [&](std::uint32_t x) { return evaluate_bits(f, x); });
}

DecisionTree parity_tree() {
  DecisionTree::Builder b;
  const int a = b.leaf(1), c = b.leaf(-1), e = b.leaf(-1), g = b.leaf(1);
  const int lo = b.split(1, a, c), hi = b.split(1, e, g);
  return std::move(b).build(6, Domain::plus_minus, b.split(0, lo, hi));
}

}  // namespace

TEST(Params, TreeUniformEcho) {
  const auto p = default_params_tree_uniform(4, 0.08);
  EXPECT_EQ(p.d, 9);
  EXPECT_NEAR(p.theta, 0.01, 1e-15);
}

TEST(Params, SparseSmallCase) {
  const auto p = default_params_sparse(2, 1, 0.5, 1);
  EXPECT_EQ(p.d, 6);
  EXPECT_NEAR(p.theta, 1.0 / 1024, 1e-15);
  EXPECT_EQ(p.d_prime, 12);
  EXPECT_EQ(p.set_cap, 2 * std::exp2(18));
}

TEST(Params, SparseFormulaReimplemented) {
  const double t = 8, B = 2, eps = 0.1, a = 1.5;
  const double base = (1 + a) / a;
  const double core = 4 * t * t * t * B * B;
  const int d = static_cast<int>(std::ceil(std::log(core / eps) / std::log(base)));
  const double theta = std::exp(-2 * std::log(core) * std::log(1 + a) / std::log(base));
  const int dp = static_cast<int>(std::ceil(std::log(2 * t / theta) / std::log(base)));
  const auto p = default_params_sparse(8, 2, 0.1, 1.5);
  EXPECT_EQ(p.d, d);
  EXPECT_NEAR(p.theta / theta, 1.0, 1e-12);
  EXPECT_EQ(p.d_prime, dp);
}

TEST(Params, OtherFormulas) {
  const auto l = default_params_logdepth(8, 3, 1.5);
  EXPECT_EQ(l.d, 3);
  EXPECT_NEAR(l.theta, std::pow(2.5, -4), 1e-15);
  const auto dnf = default_params_dnf(4, 0.1);
  EXPECT_EQ(dnf.d, 6);
  EXPECT_NEAR(dnf.theta, 0.1 / 16, 1e-15);
  const auto prod = default_params_tree_product(4, 0.1, 0.5);
  EXPECT_EQ(prod.d, static_cast<int>(std::ceil(std::log2(320.0))));
  EXPECT_THROW(default_params_tree_product(4, 0.1, 0.6), ConfigError);
}

TEST(Config, Validation) {
  LearnerConfig c;
  c.epsilon = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.epsilon = 0.1;
  c.alpha = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c.alpha = 1;
  c.eta = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SparsePoly, SingleMonomial) {
  // f = 5 x3 over {0,1}^6.
  const SparsePolynomial f(6, Domain::zero_one, {{0b100, 5.0}}, 1, 5.0);
  OracleSession s(f, Distribution::uniform(6, Domain::zero_one), 2, 11);
  LearnerConfig cfg;
  cfg.t = 1;
  cfg.B = 5;
  cfg.epsilon = 0.5;
  const auto out = learn_sparse_poly(s, cfg);
  EXPECT_EQ(out.sets, (std::vector<Subset>{0, 0b100}));
  EXPECT_NEAR(out.hypothesis.coefficient(0b100), 5.0, 0.05);
  EXPECT_NEAR(out.hypothesis.coefficient(0), 0.0, 0.05);
  EXPECT_TRUE(out.locality_limited);
  EXPECT_EQ(out.audit.violations, 0u);
  EXPECT_LE(out.audit.max_locality_used, 2);
}

TEST(SparsePoly, RecoversUnderSmoothTable) {
  SplitMix64 rng(12);
  const int n = 12;
  const auto f = random_sparse_polynomial(n, Domain::zero_one, 4, 3, 2, rng);
  const auto d = random_smooth_table(n, Domain::zero_one, 1.5, rng);
  OracleSession s(f, d, 3, 13);
  LearnerConfig cfg;
  cfg.t = 4;
  cfg.B = 2;
  cfg.epsilon = 0.1;
  cfg.alpha = 1.5;
  const auto out = learn_sparse_poly(s, cfg);
  for (const auto& [S, c] : f.terms()) EXPECT_NEAR(out.hypothesis.coefficient(S), c, 0.05) << "mask " << S;
  EXPECT_FALSE(out.sign_output);
}

TEST(SparsePoly, RejectsPlusMinusSession) {
  OracleSession s(DecisionTree::constant(4, Domain::plus_minus, 1), Distribution::uniform(4, Domain::plus_minus), 1, 1);
  EXPECT_THROW(learn_sparse_poly(s, LearnerConfig{}), ContractViolation);
}

TEST(LogDepth, DepthOneTree) {
  DecisionTree::Builder b;
  const int lo = b.leaf(-1), hi = b.leaf(1);
  const auto g = std::move(b).build(6, Domain::plus_minus, b.split(0, lo, hi));
  OracleSession s(g, Distribution::uniform(6, Domain::plus_minus), 1, 14);
  LearnerConfig cfg;
  cfg.t = 2;
  cfg.depth = 1;
  const auto out = learn_logdepth_tree(s, cfg);
  EXPECT_EQ(out.sets, (std::vector<Subset>{0, 0b1}));
  EXPECT_EQ(exact_error(out, g, Distribution::uniform(6, Domain::plus_minus)), 0.0);
}

TEST(LogDepth, ParityTreeIsExact) {
  const auto g = parity_tree();
  SplitMix64 rng(15);
  const auto d = random_smooth_table(6, Domain::plus_minus, 1.5, rng);
  OracleSession s(g, d, 2, 16);
  LearnerConfig cfg;
  cfg.t = 4;
  cfg.depth = 2;
  cfg.alpha = 1.5;
  const auto out = learn_logdepth_tree(s, cfg);
  EXPECT_EQ(out.sets, (std::vector<Subset>{0, 0b01, 0b10, 0b11}));
  EXPECT_EQ(exact_error(out, g, d), 0.0);
  EXPECT_TRUE(out.sign_output);
}

TEST(TreeUniform, LearnsRandomTrees) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SplitMix64 rng(derive_seed(17, seed));
    const int n = 14;
    const auto g = random_tree(n, Domain::plus_minus, 6, 4, rng);
    const auto d = Distribution::uniform(n, Domain::plus_minus);
    OracleSession s(g, d, 4, derive_seed(18, seed));
    LearnerConfig cfg;
    cfg.t = g.leaf_count();
    cfg.epsilon = 0.08;
    const auto out = learn_tree_uniform(s, cfg);
    EXPECT_LE(exact_error(out, g, d), 0.08);
    EXPECT_LE(out.audit.max_locality_used, 4);
    EXPECT_TRUE(std::is_sorted(out.sets.begin(), out.sets.end(), [](Subset a, Subset b) {
      return set_size(a) != set_size(b) ? set_size(a) < set_size(b) : a < b;
    }));
  }
}

TEST(TreeProduct, ZeroMeansReduceToUniform) {
  SplitMix64 rng(19);
  const int n = 10;
  const auto g = random_tree(n, Domain::plus_minus, 6, 3, rng);
  const auto prod = Distribution::product(std::vector<double>(n, 0.0), Domain::plus_minus);
  const auto fhat = exact_transform(g, Basis::uniform());
  LearnerConfig cfg;
  cfg.t = 6;
  cfg.epsilon = 0.1;
  cfg.c = 0.5;
  cfg.d = 3;
  cfg.theta = 0.05;
  OracleSession s(g, prod, 3, 20);
  const auto out = learn_tree_product(s, cfg);
  EXPECT_EQ(out.params["c"], 0.5);
  EXPECT_EQ(exact_error(out, g, prod), 0.0);
  for (Subset S : out.sets) EXPECT_NEAR(out.hypothesis.coefficient(S), fhat.coefficient(S), 0.05) << "mask " << S;
  for (const auto& [S, c] : fhat.coeffs)
    if (std::abs(c) >= 0.05 && set_size(S) <= 3) {
      EXPECT_TRUE(std::binary_search(out.sets.begin(), out.sets.end(), S, [](Subset a, Subset b) {
        return set_size(a) != set_size(b) ? set_size(a) < set_size(b) : a < b;
      })) << "heavy mask " << S;
    }
}

TEST(TreeProduct, RejectsMeansOutsideMargin) {
  const auto d = Distribution::product({0.9, 0.0, 0.0}, Domain::plus_minus);
  OracleSession s(DecisionTree::constant(3, Domain::plus_minus, 1), d, 1, 1);
  LearnerConfig cfg;
  cfg.c = 0.3;
  EXPECT_THROW(learn_tree_product(s, cfg), ConfigError);
}

TEST(Dnf, SingleAnd) {
  const TargetFunction f = DnfFormula::from_literals(8, Domain::plus_minus, {{1, 2}});
  const auto d = Distribution::uniform(8, Domain::plus_minus);
  OracleSession s(f, d, 4, 21);
  LearnerConfig cfg;
  cfg.s = 1;
  cfg.epsilon = 0.1;
  const auto out = learn_dnf(s, cfg);
  EXPECT_EQ(out.sets, (std::vector<Subset>{0, 0b01, 0b10, 0b11}));
  EXPECT_EQ(exact_error(out, f, d), 0.0);
  EXPECT_TRUE(out.substitution.has_value());
}

TEST(Growth, CapIsEnforced) {
  OracleSession s(parity_tree(), Distribution::uniform(6, Domain::plus_minus), 2, 22);
  EXPECT_THROW(grow_sets(s, 2, 3, [](Subset) { return true; }), BudgetExceeded);
  const auto g = grow_sets(s, 2, 100, [](Subset c) { return c == 0b1; });
  EXPECT_EQ(g.sets, (std::vector<Subset>{0, 0b1}));
  ASSERT_EQ(g.levels.size(), 2u);
  EXPECT_EQ(g.levels[0].candidates, 6u);
  EXPECT_EQ(g.levels[1].candidates, 5u);
}

TEST(EtaSearch, LandsNearTrueRate) {
  SplitMix64 rng(23);
  const int n = 12;
  const auto g = random_tree(n, Domain::plus_minus, 6, 3, rng);
  for (double eta : {0.0, 0.1}) {
    OracleSession s(g, Distribution::uniform(n, Domain::plus_minus), 3, 24, NoiseWrapper(eta, 25));
    LearnerConfig cfg;
    cfg.t = 6;
    cfg.depth = 3;
    cfg.epsilon = 0.2;
    cfg.max_noisy_test_samples = 5000;
    const auto r = eta_binary_search(s, learn_logdepth_tree, cfg, {5000, 0.005});
    EXPECT_DOUBLE_EQ(r.step, 0.025);
    EXPECT_LE(std::abs(r.selected_eta - eta), r.step + 1e-12) << "eta " << eta;
    if (eta == 0.0) {
      EXPECT_EQ(r.selected_eta, 0.0);
    }
  }
}

TEST(Verification, CorruptedOracleIsCaught) {
  // The learner only sees the oracle; the check compares its output with the
  // target the caller believes in. A session wired to a different tree must
  // show up as error.
  SplitMix64 rng(26);
  const int n = 10;
  const auto g = random_tree(n, Domain::plus_minus, 6, 3, rng);
  DecisionTree::Builder b;
  const int lo = b.leaf(-1), hi = b.leaf(1);
  const auto other = std::move(b).build(n, Domain::plus_minus, b.split(n - 1, lo, hi));
  const auto d = Distribution::uniform(n, Domain::plus_minus);
  OracleSession s(other, d, 3, 27);
  LearnerConfig cfg;
  cfg.t = 6;
  cfg.depth = 3;
  const auto out = learn_logdepth_tree(s, cfg);
  EXPECT_EQ(exact_error(out, other, d), 0.0);
  EXPECT_GT(exact_error(out, g, d), 0.1);
}

TEST(Outcome, JsonShape) {
  OracleSession s(parity_tree(), Distribution::uniform(6, Domain::plus_minus), 2, 28);
  LearnerConfig cfg;
  cfg.t = 4;
  cfg.depth = 2;
  const auto out = learn_logdepth_tree(s, cfg);
  const auto j = out.to_json();
  EXPECT_EQ(j["algorithm"], "logdepth-tree");
  EXPECT_EQ(j["sets"][3], nlohmann::json::array({1, 2}));
  EXPECT_FALSE(j.contains("wall_ms"));
  EXPECT_TRUE(out.to_json(true).contains("wall_ms"));
  EXPECT_EQ(j["set_count"], 4);
}
