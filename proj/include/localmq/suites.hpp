#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/distributions.hpp"
#include "localmq/errors.hpp"
#include "localmq/fourier.hpp"
#include "localmq/generators.hpp"
#include "localmq/learners.hpp"
#include "localmq/noise.hpp"
#include "localmq/random.hpp"
#include "localmq/reduction.hpp"
#include "localmq/targets.hpp"
#include "localmq/verifier.hpp"

namespace localmq {

struct SuiteParams {
  int n = 10;
  double alpha = 1.5;
  int t = 8;
  std::size_t instances = 200;
  std::uint64_t seed = 1;
};

// Margins are "bound minus observed" for inequalities and "minus residual"
// for identities; a check fails when its margin drops below -tolerance.
struct SuiteReport {
  std::string suite;
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0;
  nlohmann::json counterexample = nullptr;
  nlohmann::json params;

  bool pass() const { return violations == 0; }

  void record(double margin, const std::function<nlohmann::json()>& witness, bool strict = false) {
    ++checks;
    worst_margin = std::min(worst_margin, margin);
    const bool bad = strict ? !(margin > 0) : margin < -tolerance;
    if (bad) {
      ++violations;
      if (counterexample.is_null()) {
        counterexample = witness();
        counterexample["margin"] = margin;
      }
    }
  }

  nlohmann::json to_json() const {
    return {{"suite", suite},
            {"pass", pass()},
            {"instances", instances},
            {"checks", checks},
            {"violations", violations},
            {"worst_margin", checks ? nlohmann::json(worst_margin) : nlohmann::json(nullptr)},
            {"tolerance", tolerance},
            {"counterexample", counterexample},
            {"params", params}};
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "parseval",    "fact-smooth", "lemma-b1",  "lemma-b2",  "lemma-b3",     "lemma-d2",
      "fact-d1",     "km-norms",    "lemma-d5",  "lemma-d6",  "lemma-d7",     "dnf-drop",
      "restriction-identity",       "rcn-monotone",           "correlation",  "dnf-growth"};
  return names;
}

namespace suites {

using Fn = std::function<double(std::uint32_t)>;

inline Fn as_fn(const TargetFunction& f) {
  return [&f](std::uint32_t x) { return evaluate_bits(f, x); };
}

inline nlohmann::json subset_json(Subset s) { return to_one_based(s); }

inline std::map<Subset, double> dense_to_map(const std::vector<double>& dense, double zeta = 1e-12) {
  std::map<Subset, double> m;
  for (std::size_t s = 0; s < dense.size(); ++s)
    if (std::abs(dense[s]) > zeta) m.emplace_hint(m.end(), static_cast<Subset>(s), dense[s]);
  return m;
}

// Random t in [2, t_max], tree of depth <= max_depth.
inline DecisionTree some_tree(int n, Domain dom, int t_max, int max_depth, SplitMix64& rng) {
  const int t = 2 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::max(1, t_max - 1))));
  return random_tree(n, dom, t, std::min(max_depth, n), rng);
}

// Deep trees that make truncation bite: half path trees, half bushy trees.
inline DecisionTree deep_tree(int n, Domain dom, int t_max, SplitMix64& rng) {
  if (uniform_below(rng, 2)) {
    const int depth = std::min(n, 4 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::max(1, n - 3)))));
    return random_path_tree(n, dom, depth, rng);
  }
  return some_tree(n, dom, t_max, n, rng);
}

inline void check_n(const SuiteParams& p, int lo, int hi) {
  if (p.n < lo || p.n > hi)
    throw ContractViolation("suite needs " + std::to_string(lo) + " <= n <= " + std::to_string(hi));
}

inline void parseval(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 1, 14);
  r.tolerance = 1e-9;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    // Boolean tree and a real-valued polynomial, both on {-1,1}^n.
    const TargetFunction g = some_tree(p.n, Domain::plus_minus, p.t, 6, rng);
    const TargetFunction q = random_sparse_polynomial(p.n, Domain::plus_minus, p.t, 4, 3, rng, true);
    const auto mu = random_means(p.n, 0.8, rng);
    for (const TargetFunction* f : {&g, &q}) {
      const auto table = truth_table(*f);
      for (const Basis& b : {Basis::uniform(), Basis::product(mu)}) {
        const auto dense = dense_transform(table, p.n, b);
        double sq = 0;
        for (double c : dense) sq += c * c;
        const double e2 = verify::second_moment(table, p.n, b);
        const auto witness = [&] {
          return nlohmann::json{{"check", "sum of squares"}, {"basis", to_string(b.kind)}, {"target", to_json(*f)},
                                {"means", mu}};
        };
        r.record(-std::abs(sq - e2), witness);
        const auto ref = verify::recursive_transform(table, p.n, b);
        double diff = 0;
        for (std::size_t s = 0; s < ref.size(); ++s) diff = std::max(diff, std::abs(ref[s] - dense[s]));
        r.record(-diff, [&] {
          auto j = witness();
          j["check"] = "fast transform vs reference";
          return j;
        });
      }
    }
    const int m = std::min(p.n, 6);
    const std::vector<double> mu_small(mu.begin(), mu.begin() + m);
    r.record(-verify::orthonormality_residual(Basis::product(mu_small), m),
             [&] { return nlohmann::json{{"check", "orthonormality"}, {"means", mu_small}}; });
  }
}

inline void fact_smooth(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  const double a = p.alpha;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const Distribution d = random_smooth_table(p.n, Domain::zero_one, a, rng);
    const auto witness = [&](const std::string& what) {
      return [&, what] { return nlohmann::json{{"check", what}, {"alpha", a}, {"distribution", to_json(d)}}; };
    };
    r.record(a - d.verify_smoothness(), witness("table smoothness"));
    // (1) single-bit marginals.
    for (int i = 0; i < p.n; ++i) {
      const double hi = d.exact_event_prob([i](std::uint32_t x) { return contains(x, i); });
      for (double pb : {hi, 1.0 - hi}) {
        r.record(pb - 1.0 / (1.0 + a), witness("bit " + std::to_string(i + 1) + " lower"));
        r.record(a / (1.0 + a) - pb, witness("bit " + std::to_string(i + 1) + " upper"));
      }
    }
    // (2), (3), (4) on a random S and assignment.
    const int sz = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::min(4, p.n - 1))));
    const Subset s = random_subset(p.n, sz, rng);
    const std::uint32_t b = static_cast<std::uint32_t>(rng()) & s;
    r.record(a - d.marginal(s).verify_smoothness(), witness("marginal smoothness"));
    r.record(a - d.conditional_marginal(s, b).verify_smoothness(), witness("conditional smoothness"));
    const double pr = d.exact_event_prob([s, b](std::uint32_t x) { return (x & s) == b; });
    r.record(pr - std::pow(1.0 / (1.0 + a), sz), witness("pattern lower"));
    r.record(std::pow(a / (1.0 + a), sz) - pr, witness("pattern upper"));
    // Convex combinations.
    const Distribution e = random_smooth_table(p.n, Domain::zero_one, a, rng);
    const double w = uniform01(rng);
    const Distribution mix = mixture({d, e}, {w, 1.0 - w});
    r.record(a - mix.verify_smoothness(), witness("mixture smoothness"));
  }
}

// Sparse {0,1} polynomial with small integer coefficients (so cancellations
// occur) and an alpha-smooth table.
struct PolyInstance {
  SparsePolynomial f;
  Distribution d;
};

inline PolyInstance poly_instance(const SuiteParams& p, SplitMix64& rng, bool constant, int B) {
  auto f = random_sparse_polynomial(p.n, Domain::zero_one, p.t, 4, B, rng, constant);
  auto d = random_smooth_table(p.n, Domain::zero_one, p.alpha, rng);
  return {std::move(f), std::move(d)};
}

inline std::map<Subset, double> poly_coeffs(const SparsePolynomial& f) {
  std::map<Subset, double> m;
  for (const auto& [s, c] : f.terms()) m[s] += c;
  return m;
}

inline void lemma_b1(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto inst = poly_instance(p, rng, true, 1);
    const TargetFunction f = inst.f;
    const double pr = verify::nonzero_probability(inst.d, as_fn(f));
    const double t = static_cast<double>(inst.f.terms().size());
    const double bound = std::pow(1.0 / (1.0 + p.alpha), std::log2(t));
    r.record(pr - bound, [&] {
      return nlohmann::json{{"target", to_json(f)}, {"distribution", to_json(inst.d)}, {"prob", pr}, {"bound", bound}};
    });
  }
}

// Picks S inside a random term and returns (S, min degree of f_S).
inline std::pair<Subset, int> pick_restriction(const SparsePolynomial& f, SplitMix64& rng) {
  const auto& terms = f.terms();
  const Subset t = terms[uniform_below(rng, terms.size())].first;
  Subset s = 0;
  for (int i : elements(t))
    if (uniform_below(rng, 2)) s |= Subset{1} << i;
  int mindeg = std::numeric_limits<int>::max();
  for (const auto& [u, c] : terms)
    if ((u & s) == s) mindeg = std::min(mindeg, set_size(u & ~s));
  return {s, mindeg};
}

inline void lemma_b23(const SuiteParams& p, SuiteReport& r, bool lower) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto inst = poly_instance(p, rng, false, 2);
    const auto coeffs = poly_coeffs(inst.f);
    const auto [s, mindeg] = pick_restriction(inst.f, rng);
    const Basis mono = Basis::monomial();
    const double pr = verify::nonzero_probability(
        inst.d, [&, s = s](std::uint32_t x) { return verify::symbolic_restriction(coeffs, mono, s, x); });
    const double t = static_cast<double>(inst.f.terms().size());
    const double a = p.alpha;
    const double bound = lower ? std::pow(1.0 / (1.0 + a), mindeg + std::log2(t))
                               : t * std::pow(a / (1.0 + a), mindeg);
    r.record(lower ? pr - bound : bound - pr, [&, s = s, mindeg = mindeg] {
      return nlohmann::json{{"target", to_json(TargetFunction(inst.f))},
                            {"distribution", to_json(inst.d)},
                            {"S", subset_json(s)},
                            {"min_degree", mindeg},
                            {"prob", pr},
                            {"bound", bound}};
    });
  }
}

inline void lemma_d2(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  const Basis u = Basis::uniform();
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    TargetFunction f = uniform_below(rng, 2) ? TargetFunction(some_tree(p.n, Domain::plus_minus, p.t, 5, rng))
                                             : TargetFunction(random_sparse_polynomial(p.n, Domain::plus_minus, p.t, 4, 2, rng));
    const Distribution d = random_smooth_table(p.n, Domain::plus_minus, p.alpha, rng);
    const auto coeffs = dense_to_map(verify::recursive_transform(verify::table_of(as_fn(f), p.n), p.n, u));
    // Checked in the direction the chain argument uses: a nonzero f_{S u i}
    // forces f_S != 0 at one of the two values of x_i. Drawing S u {i} from the
    // support keeps the right-hand side away from zero.
    std::vector<Subset> support;
    for (const auto& [T, c] : coeffs)
      if (T != 0 && std::abs(c) > 1e-12) support.push_back(T);
    if (support.empty()) continue;
    const auto vars = elements(support[uniform_below(rng, support.size())]);
    const int i = vars[uniform_below(rng, vars.size())];
    Subset s = 0;
    for (int v : vars)
      if (v != i && set_size(s) < 3 && uniform_below(rng, 2)) s |= Subset{1} << v;
    const Subset si = s | (Subset{1} << i);
    const double ps = verify::nonzero_probability(d, [&](std::uint32_t x) { return verify::symbolic_restriction(coeffs, u, s, x); });
    const double psi = verify::nonzero_probability(d, [&](std::uint32_t x) { return verify::symbolic_restriction(coeffs, u, si, x); });
    r.record(ps - psi / (1.0 + p.alpha), [&] {
      return nlohmann::json{{"target", to_json(f)}, {"distribution", to_json(d)}, {"S", subset_json(s)},
                            {"i", i + 1}, {"prob_S", ps}, {"prob_S_i", psi}};
    });
  }
}

inline void fact_d1(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto g = some_tree(p.n, Domain::plus_minus, 16, 7, rng);
    const auto dense = verify::recursive_transform(verify::table_of(as_fn(g), p.n), p.n, Basis::uniform());
    const double t = g.leaf_count();
    for (double tau : {0.02, 0.05, 0.1, 0.25, 0.5}) {
      const double cut = std::log2(t * t / tau);
      double tail = 0;
      for (std::size_t s = 0; s < dense.size(); ++s)
        if (set_size(static_cast<Subset>(s)) >= cut) tail += dense[s] * dense[s];
      r.record(tau - tail, [&, tau] {
        return nlohmann::json{{"target", to_json(TargetFunction(g))}, {"tau", tau}, {"tail", tail}};
      });
    }
  }
}

inline void km_norms(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 1, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto g = some_tree(p.n, Domain::plus_minus, 16, 7, rng);
    const auto dense = verify::recursive_transform(verify::table_of(as_fn(g), p.n), p.n, Basis::uniform());
    const double t = g.leaf_count();
    double l1 = 0, worst = std::numeric_limits<double>::infinity();
    Subset arg = 0;
    for (std::size_t s = 0; s < dense.size(); ++s) {
      l1 += std::abs(dense[s]);
      const double m = std::ldexp(t, -set_size(static_cast<Subset>(s))) - std::abs(dense[s]);
      if (m < worst) {
        worst = m;
        arg = static_cast<Subset>(s);
      }
    }
    const auto witness = [&] { return nlohmann::json{{"target", to_json(TargetFunction(g))}, {"S", subset_json(arg)}, {"l1", l1}}; };
    r.record(worst, witness);
    r.record(t - l1, witness);
  }
}

struct ProductTreeInstance {
  DecisionTree f;
  std::vector<double> mu;
  double c = 0;
};

inline ProductTreeInstance product_tree_instance(const SuiteParams& p, SplitMix64& rng) {
  const double c = 0.3 + 0.2 * uniform01(rng);
  auto f = deep_tree(p.n, Domain::plus_minus, 16, rng);
  auto mu = random_means(p.n, 1.0 - 2.0 * c, rng);
  return {std::move(f), std::move(mu), c};
}

inline void lemma_d5(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto inst = product_tree_instance(p, rng);
    const Distribution mu = Distribution::product(inst.mu, Domain::plus_minus);
    const double t = inst.f.leaf_count();
    const double cap = uniform_below(rng, 2) ? 1.0 : -1.0;
    const auto err_at = [&](int d) {
      const auto g = truncate_tree(inst.f, d, cap);
      return verify::disagreement(mu, as_fn(inst.f), [&g](std::uint32_t x) { return g.eval_bits(x); });
    };
    const auto witness = [&](int d, double bound) {
      return [&, d, bound] {
        return nlohmann::json{{"target", to_json(TargetFunction(inst.f))}, {"means", inst.mu}, {"c", inst.c},
                              {"depth", d}, {"cap_label", cap}, {"bound", bound}};
      };
    };
    for (int d = 1; d <= inst.f.depth(); ++d) {
      const double bound = t * std::pow(1.0 - inst.c, d);
      r.record(bound - err_at(d), witness(d, bound));
    }
    for (double tau : {0.05, 0.2, 0.5}) {
      const int d = std::max(1, static_cast<int>(std::ceil(std::log(t / tau) / std::log(1.0 / (1.0 - inst.c)))));
      r.record(tau - err_at(d), witness(d, tau));
    }
  }
}

inline void lemma_d6(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 1, 14);
  r.tolerance = 1e-9;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto g = some_tree(p.n, Domain::plus_minus, 16, 7, rng);
    const auto mu = random_means(p.n, 0.9, rng);
    const auto table = verify::table_of(as_fn(g), p.n);
    const double t = g.leaf_count();
    for (const Basis& b : {Basis::uniform(), Basis::product(mu)}) {
      const auto ref = verify::recursive_transform(table, p.n, b);
      const auto poly = tree_to_polynomial(g, b);
      double diff = 0;
      for (std::size_t s = 0; s < ref.size(); ++s)
        diff = std::max(diff, std::abs(ref[s] - poly.coefficient(static_cast<Subset>(s))));
      const auto support = dense_to_map(ref, 1e-12);
      int widest = 0;
      for (const auto& [s, c] : support) widest = std::max(widest, set_size(s));
      const auto witness = [&] {
        return nlohmann::json{{"target", to_json(TargetFunction(g))}, {"basis", to_string(b.kind)}, {"means", mu},
                              {"support", support.size()}, {"widest", widest}};
      };
      r.record(-diff, witness);
      r.record(t * std::ldexp(1.0, g.depth()) - static_cast<double>(support.size()), witness);
      r.record(static_cast<double>(g.depth() - widest), witness);
    }
  }
}

inline void lemma_d7(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto inst = product_tree_instance(p, rng);
    const Basis b = Basis::product(inst.mu);
    const auto fhat = verify::recursive_transform(verify::table_of(as_fn(inst.f), p.n), p.n, b);
    const double t = inst.f.leaf_count();
    for (double tau : {0.1, 0.5, 1.0}) {
      const int d = std::max(1, static_cast<int>(std::ceil(std::log(4.0 * t / tau) / std::log(1.0 / (1.0 - inst.c)))));
      const auto g = truncate_tree(inst.f, d);
      const auto ghat = verify::recursive_transform(verify::table_of([&g](std::uint32_t x) { return g.eval_bits(x); }, p.n), p.n, b);
      double outside = 0;
      for (std::size_t s = 0; s < fhat.size(); ++s)
        if (std::abs(ghat[s]) <= 1e-12) outside += fhat[s] * fhat[s];
      r.record(tau - outside, [&, tau, d] {
        return nlohmann::json{{"target", to_json(TargetFunction(inst.f))}, {"means", inst.mu}, {"c", inst.c},
                              {"tau", tau}, {"depth", d}, {"outside", outside}};
      });
    }
  }
}

inline void dnf_drop(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 2, 14);
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const int s = 1 + static_cast<int>(uniform_below(rng, 6));
    std::vector<std::vector<int>> terms;
    for (int j = 0; j < s; ++j) {
      const int w = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::min(p.n, 7))));
      std::vector<int> lits;
      for (int v : elements(random_subset(p.n, w, rng))) lits.push_back(uniform_below(rng, 2) ? v + 1 : -(v + 1));
      terms.push_back(std::move(lits));
    }
    const auto f = DnfFormula::from_literals(p.n, Domain::plus_minus, terms);
    const int l = 1 + static_cast<int>(uniform_below(rng, 6));
    const auto g = f.drop_wide_terms(l);
    const double sq = 4.0 * verify::disagreement(Distribution::uniform(p.n, Domain::plus_minus), as_fn(f),
                                                 [&g](std::uint32_t x) { return g.eval_bits(x); });
    const double bound = 4.0 * s * std::ldexp(1.0, -l);
    r.record(bound - sq, [&, l] {
      return nlohmann::json{{"target", to_json(TargetFunction(f))}, {"width", l}, {"sq_distance", sq}, {"bound", bound}};
    });
  }
}

inline void restriction_identity(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 1, 12);
  r.tolerance = 1e-9;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const TargetFunction f = some_tree(p.n, Domain::plus_minus, p.t, 6, rng);
    const auto table = verify::table_of(as_fn(f), p.n);
    const auto mu = random_means(p.n, 0.8, rng);
    const int sz = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(std::min(4, p.n) + 1)));
    const Subset s = random_subset(p.n, sz, rng);
    for (const Basis& b : {Basis::uniform(), Basis::product(mu)}) {
      const auto fhat = verify::recursive_transform(table, p.n, b);
      const auto rest = verify::table_of([&](std::uint32_t x) { return verify::restriction_from_table(table, b, s, x); }, p.n);
      const auto rhat = verify::recursive_transform(rest, p.n, b);
      double worst = 0;
      for (std::size_t u = 0; u < rhat.size(); ++u) {
        const double want = (u & s) ? 0.0 : fhat[u | s];
        worst = std::max(worst, std::abs(rhat[u] - want));
      }
      const auto coeffs = dense_to_map(fhat, 0.0);
      for (std::uint32_t x = 0; x < rest.size(); ++x)
        worst = std::max(worst, std::abs(rest[x] - verify::symbolic_restriction(coeffs, b, s, x)));
      r.record(-worst, [&] {
        return nlohmann::json{{"target", to_json(f)}, {"basis", to_string(b.kind)}, {"means", mu}, {"S", subset_json(s)}};
      });
    }
  }
}

inline void rcn_monotone(const SuiteParams&, SuiteReport& r) {
  r.tolerance = 0;
  std::vector<int> ks;
  for (int k = 1; k <= 1024; k = k < 8 ? k + 1 : k * 2) ks.push_back(k);
  for (double eta : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    for (int k : ks) {
      double prev = rcn_collision_prob(k, 0, eta);
      const double p1 = rcn_collision_prob(k, 1, eta);
      const double lb = rcn_gap_lower_bound(k, eta);
      r.record((prev - p1) - lb, [&, k, eta] {
        return nlohmann::json{{"check", "gap bound"}, {"k", k}, {"eta", eta}, {"gap", prev - p1}, {"bound", lb}};
      });
      for (int i = 1; i <= k; ++i) {
        const double cur = rcn_collision_prob(k, i, eta);
        if (!(cur > 0) || cur < 1e-290) break;  // underflow region: nothing to compare
        r.record(prev - cur, [&, k, i, eta] {
          return nlohmann::json{{"check", "strictly decreasing"}, {"k", k}, {"i", i}, {"eta", eta}};
        }, true);
        prev = cur;
      }
    }
  }
  r.instances = ks.size() * 5;
}

inline void correlation(const SuiteParams& p, SuiteReport& r) {
  r.tolerance = 1e-12;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const int n = 3 + static_cast<int>(uniform_below(rng, 4));
    const auto code = build_code(n, 1);
    const TargetFunction f = some_tree(n, Domain::plus_minus, 6, 4, rng);
    const TargetFunction g = some_tree(n, Domain::plus_minus, 6, 4, rng);
    const auto c1 = correlation_check(f, g, code);
    r.record(-c1.residual(), [&] { return nlohmann::json{{"check", "message-cube form"}, {"f", to_json(f)}, {"g", to_json(g)}, {"code", code.to_json()}}; });
    std::vector<double> h(std::size_t{1} << code.length());
    for (auto& v : h) v = uniform_below(rng, 2) ? 1.0 : -1.0;
    const auto c2 = correlation_check_lifted(f, [&h](std::uint32_t z) { return h[z]; }, code);
    r.record(-c2.residual(), [&] { return nlohmann::json{{"check", "lifted form"}, {"f", to_json(f)}, {"code", code.to_json()}}; });
  }
}

// Growth log of the DNF learner against its configured cap (s=4, eps=0.1).
inline void dnf_growth(const SuiteParams& p, SuiteReport& r) {
  check_n(p, 4, 20);
  r.tolerance = 0;
  for (std::size_t k = 0; k < p.instances; ++k) {
    SplitMix64 rng(derive_seed(p.seed, k));
    const auto f = random_dnf(p.n, Domain::plus_minus, 4, 3 + static_cast<int>(uniform_below(rng, 3)), rng);
    LearnerConfig cfg;
    cfg.s = 4;
    cfg.epsilon = 0.1;
    cfg.max_heldout = 2000;
    const auto prm = default_params_dnf(cfg.s, cfg.epsilon);
    OracleSession session(f, Distribution::uniform(p.n, Domain::plus_minus), prm.d, derive_seed(p.seed, 1000 + k));
    std::size_t size = 0;
    try {
      size = learn_dnf(session, cfg).sets.size();
    } catch (const BudgetExceeded&) {
      size = static_cast<std::size_t>(-1);
    }
    r.record(std::log2(prm.set_cap) - std::log2(static_cast<double>(size)), [&] {
      return nlohmann::json{{"target", to_json(TargetFunction(f))}, {"sets", size}, {"cap", prm.set_cap}};
    });
  }
}

}  // namespace suites

inline SuiteReport run_lemma_suite(const std::string& id, const SuiteParams& p) {
  if (p.instances == 0) throw ContractViolation("suite needs at least one instance");
  if (!(p.alpha >= 1.0)) throw ContractViolation("alpha must be at least 1");
  if (p.t < 2) throw ContractViolation("suite needs t >= 2");
  SuiteReport r;
  r.suite = id;
  r.instances = p.instances;
  r.params = {{"n", p.n}, {"alpha", p.alpha}, {"t", p.t}, {"instances", p.instances}, {"seed", p.seed}};
  if (id == "parseval") suites::parseval(p, r);
  else if (id == "fact-smooth") suites::fact_smooth(p, r);
  else if (id == "lemma-b1") suites::lemma_b1(p, r);
  else if (id == "lemma-b2") suites::lemma_b23(p, r, true);
  else if (id == "lemma-b3") suites::lemma_b23(p, r, false);
  else if (id == "lemma-d2") suites::lemma_d2(p, r);
  else if (id == "fact-d1") suites::fact_d1(p, r);
  else if (id == "km-norms") suites::km_norms(p, r);
  else if (id == "lemma-d5") suites::lemma_d5(p, r);
  else if (id == "lemma-d6") suites::lemma_d6(p, r);
  else if (id == "lemma-d7") suites::lemma_d7(p, r);
  else if (id == "dnf-drop") suites::dnf_drop(p, r);
  else if (id == "restriction-identity") suites::restriction_identity(p, r);
  else if (id == "rcn-monotone") suites::rcn_monotone(p, r);
  else if (id == "correlation") suites::correlation(p, r);
  else if (id == "dnf-growth") suites::dnf_growth(p, r);
  else throw ContractViolation("unknown suite '" + id + "'");
  return r;
}

}  // namespace localmq
