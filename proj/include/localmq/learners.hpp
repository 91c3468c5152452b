#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/errors.hpp"
#include "localmq/fourier.hpp"
#include "localmq/noise.hpp"
#include "localmq/numerics.hpp"
#include "localmq/oracles.hpp"
#include "localmq/regression.hpp"
#include "localmq/spectrum.hpp"

namespace localmq {

struct LearnerConfig {
  double epsilon = 0.1;
  double delta = 0.1;
  int t = 1;            // sparsity / leaf count
  double B = 1.0;       // coefficient bound
  int s = 1;            // DNF size
  int depth = 1;        // depth bound for the log-depth learner
  double alpha = 1.0;   // smoothness bound
  std::optional<double> c;    // product-mean margin; derived from the means if unset
  std::optional<double> eta;  // known noise rate (log-depth learner)

  std::optional<int> d;
  std::optional<double> theta;
  std::optional<int> d_prime;
  std::optional<double> set_cap;

  // Practical caps on the Hoeffding sample sizes (both values are reported).
  std::size_t max_test_samples = 1000;
  std::size_t max_noisy_test_samples = 20000;
  std::size_t max_coef_samples = 4000;
  std::size_t regression_samples = 4000;
  std::size_t dnf_coef_samples = 50000;
  std::size_t max_heldout = 20000;
  bool early_accept = true;
  double zeta = 0;  // 0: 1e-10 * max(1, tB)

  void validate() const {
    if (!(epsilon > 0 && epsilon < 1)) throw ConfigError("epsilon must lie in (0,1)");
    if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0,1)");
    if (!(alpha >= 1)) throw ConfigError("alpha must be at least 1");
    if (t < 1 || s < 1 || depth < 0) throw ConfigError("t, s must be positive and depth nonnegative");
    if (!(B > 0)) throw ConfigError("B must be positive");
    if (eta && !(*eta >= 0 && *eta < 0.5)) throw ConfigError("eta must lie in [0, 1/2)");
  }
};

struct GrowthLevel {
  int level = 0;
  std::size_t candidates = 0;
  std::size_t admitted = 0;
  std::size_t examples = 0;
};

struct HeldOut {
  std::size_t samples = 0;
  double squared_loss = 0;
  double zero_one = 0;
};

struct LearnOutcome {
  std::string algorithm;
  nlohmann::json params = nlohmann::json::object();
  std::vector<Subset> sets;  // ascending (|S|, mask)
  FourierSpectrum hypothesis;
  bool sign_output = false;
  std::optional<std::string> substitution;
  bool locality_limited = false;
  std::vector<GrowthLevel> growth;
  nlohmann::json regression;  // null unless a regression step ran
  HeldOut heldout;
  AuditSummary audit;
  double wall_ms = 0;

  double predict_raw(std::uint32_t bits) const { return hypothesis.evaluate(bits); }
  double predict(std::uint32_t bits) const {
    const double v = hypothesis.evaluate(bits);
    return sign_output ? (v >= 0 ? 1.0 : -1.0) : v;
  }

  nlohmann::json to_json(bool with_timing = false) const {
    nlohmann::json sj = nlohmann::json::array();
    for (Subset s : sets) sj.push_back(to_one_based(s));
    nlohmann::json gj = nlohmann::json::array();
    for (const auto& g : growth)
      gj.push_back({{"level", g.level},
                    {"candidates", g.candidates},
                    {"admitted", g.admitted},
                    {"examples", g.examples}});
    nlohmann::json j{{"algorithm", algorithm},
                     {"params", params},
                     {"sets", sj},
                     {"set_count", sets.size()},
                     {"hypothesis", localmq::to_json(hypothesis)},
                     {"sign_output", sign_output},
                     {"substitution", substitution ? nlohmann::json(*substitution) : nlohmann::json(nullptr)},
                     {"locality_limited", locality_limited},
                     {"growth", gj},
                     {"regression", regression},
                     {"heldout",
                      {{"samples", heldout.samples},
                       {"squared_loss", heldout.squared_loss},
                       {"zero_one", heldout.zero_one}}},
                     {"audit", audit.to_json()}};
    if (with_timing) j["wall_ms"] = wall_ms;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Parameter formulas.

namespace detail {
inline int ceil_int(double v) { return static_cast<int>(std::ceil(v - 1e-9)); }
inline double clamp_cap(double v) { return std::isfinite(v) ? std::min(v, 1e300) : 1e300; }
}  // namespace detail

struct SparseParams {
  int d = 0;
  double theta = 0;
  int d_prime = 0;
  double set_cap = 0;  // t * 2^{d + d'}
};

inline SparseParams default_params_sparse(int t, double B, double epsilon, double alpha) {
  if (t < 1 || !(B > 0) || !(epsilon > 0) || !(alpha >= 1))
    throw ConfigError("default_params_sparse: need t >= 1, B > 0, epsilon > 0, alpha >= 1");
  const double ratio = std::log2((1.0 + alpha) / alpha);
  const double core = 4.0 * t * t * t * B * B;
  SparseParams p;
  p.d = detail::ceil_int(std::log2(core / epsilon) / ratio);
  p.theta = std::pow(core, -2.0 * std::log2(1.0 + alpha) / ratio);
  p.d_prime = detail::ceil_int(std::log2(2.0 * t / p.theta) / ratio);
  p.set_cap = detail::clamp_cap(t * std::exp2(static_cast<double>(p.d + p.d_prime)));
  return p;
}

struct TreeParams {
  int d = 0;
  double theta = 0;
  double set_cap = 0;
};

// Log-depth trees under alpha-smooth distributions.
inline TreeParams default_params_logdepth(int t, int depth, double alpha) {
  if (t < 1 || depth < 0 || !(alpha >= 1))
    throw ConfigError("default_params_logdepth: need t >= 1, depth >= 0, alpha >= 1");
  TreeParams p;
  p.d = depth;
  p.theta = std::pow(1.0 + alpha, -static_cast<double>(depth) - 1.0);
  p.set_cap = detail::clamp_cap(t * std::exp2(static_cast<double>(depth)));
  return p;
}

inline TreeParams default_params_tree_uniform(int t, double epsilon) {
  if (t < 1 || !(epsilon > 0 && epsilon < 1))
    throw ConfigError("default_params_tree_uniform: need t >= 1, epsilon in (0,1)");
  TreeParams p;
  p.d = detail::ceil_int(std::log2(2.0 * t * t / epsilon));
  p.theta = epsilon / (2.0 * t);
  p.set_cap = detail::clamp_cap(std::pow(static_cast<double>(t), 4) / std::pow(p.theta, 6));
  return p;
}

// Product measures with every mean in [-1 + 2c, 1 - 2c].
inline TreeParams default_params_tree_product(int t, double epsilon, double c) {
  if (t < 1 || !(epsilon > 0 && epsilon < 1)) throw ConfigError("default_params_tree_product: bad t/epsilon");
  if (!(c > 0 && c <= 0.5)) throw ConfigError("default_params_tree_product: c must lie in (0, 1/2]");
  const double lr = std::log2(1.0 / (1.0 - c));
  TreeParams p;
  p.d = detail::ceil_int(std::log2(8.0 * t / epsilon) / lr);
  p.theta = std::sqrt(epsilon / (2.0 * t * std::pow(8.0 * t / epsilon, 1.0 / lr)));
  p.set_cap = detail::clamp_cap(static_cast<double>(t) * t / std::pow(p.theta, 4) * std::exp2(p.d));
  return p;
}

inline TreeParams default_params_dnf(int s, double epsilon) {
  if (s < 1 || !(epsilon > 0 && epsilon < 1)) throw ConfigError("default_params_dnf: bad s/epsilon");
  TreeParams p;
  const double r = s / epsilon;
  p.d = detail::ceil_int(std::log2(r));
  p.theta = epsilon / (4.0 * s);
  const int e = std::max(detail::ceil_int(std::log2(std::max(std::log2(r), 1.0))), 0) + 3;
  p.set_cap = detail::clamp_cap(std::pow(r, e));
  return p;
}

// Number of subsets of [n] with at most d elements.
inline double count_small_sets(int n, int d) {
  double total = 0;
  for (int i = 0; i <= std::min(n, d); ++i) total += binomial(n, i);
  return total;
}

// ---------------------------------------------------------------------------
// Set growth.

struct GrowthResult {
  std::vector<Subset> sets;
  std::vector<GrowthLevel> levels;
};

// Breadth-first growth from {emptyset}: level L tests every one-element
// extension of an admitted level-(L-1) set, each distinct candidate once, in
// ascending mask order. Stops after max_level or when a level admits nothing.
template <typename Admit>
GrowthResult grow_sets(OracleSession& session, int max_level, double cap, Admit&& admit) {
  const int n = session.dimension();
  GrowthResult out;
  out.sets.push_back(0);
  std::vector<Subset> frontier{0};
  for (int level = 1; level <= max_level && !frontier.empty(); ++level) {
    std::set<Subset> candidates;
    for (Subset s : frontier)
      for (int i = 0; i < n; ++i)
        if (!contains(s, i)) candidates.insert(s | (Subset{1} << i));
    GrowthLevel lv;
    lv.level = level;
    lv.candidates = candidates.size();
    const std::size_t before = session.example_count();
    std::vector<Subset> next;
    for (Subset c : candidates) {
      if (admit(c)) {
        next.push_back(c);
        out.sets.push_back(c);
        if (static_cast<double>(out.sets.size()) > cap)
          throw BudgetExceeded("set growth passed the cap of " + std::to_string(cap) +
                               " subsets at level " + std::to_string(level));
      }
    }
    lv.admitted = next.size();
    lv.examples = session.example_count() - before;
    out.levels.push_back(lv);
    frontier = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared pieces.

namespace detail {

inline std::size_t capped(double hoeffding, std::size_t cap) {
  if (!(hoeffding >= 1)) return 1;
  return hoeffding >= static_cast<double>(cap) ? cap : static_cast<std::size_t>(hoeffding);
}

inline double per_test_delta(const LearnerConfig& cfg, int n, double cap) {
  return cfg.delta / (static_cast<double>(std::max(n, 1)) * std::max(cap, 1.0));
}

inline std::size_t heldout_size(const LearnerConfig& cfg) {
  const double v = 10.0 * std::ceil(std::log(2.0 / cfg.delta) / (cfg.epsilon * cfg.epsilon));
  return capped(v, cfg.max_heldout);
}

// Error of the hypothesis on fresh examples (labels as the oracle reports them).
inline HeldOut evaluate_heldout(OracleSession& session, const LearnOutcome& out, std::size_t m) {
  HeldOut h;
  h.samples = m;
  if (m == 0) return h;
  CompensatedSum sq, zo;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ex = session.draw_example();
    const double raw = out.predict_raw(ex.bits);
    sq += (raw - ex.label) * (raw - ex.label);
    if (out.sign_output) zo += (out.predict(ex.bits) != ex.label) ? 1.0 : 0.0;
  }
  h.squared_loss = sq.value() / static_cast<double>(m);
  h.zero_one = out.sign_output ? zo.value() / static_cast<double>(m) : 0.0;
  return h;
}

// L1-bounded least squares over the basis functions of `sets`, on fresh
// examples.
inline FourierSpectrum fit_by_regression(OracleSession& session, const std::vector<Subset>& sets,
                                         const Basis& basis, double l1_bound, std::size_t samples,
                                         nlohmann::json& log) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  rows.reserve(samples);
  labels.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const auto ex = session.draw_example();
    std::vector<double> row(sets.size());
    for (std::size_t a = 0; a < sets.size(); ++a) row[a] = basis.eval(sets[a], ex.bits);
    rows.push_back(std::move(row));
    labels.push_back(ex.label);
  }
  const auto res = constrained_regression(rows, labels, l1_bound);
  FourierSpectrum h{session.dimension(), basis, {}};
  for (std::size_t a = 0; a < sets.size(); ++a)
    if (res.coeffs[a] != 0.0) h.coeffs[sets[a]] = res.coeffs[a];
  log = {{"samples", samples},
         {"l1_bound", l1_bound},
         {"train_loss", res.loss},
         {"iterations", res.iterations},
         {"converged", res.converged}};
  return h;
}

// f^(S) as the mean of the restriction f_S over fresh examples.
inline FourierSpectrum coefficients_by_restriction(OracleSession& session,
                                                   const std::vector<Subset>& sets,
                                                   const Basis& basis, std::size_t m) {
  FourierSpectrum h{session.dimension(), basis, {}};
  for (Subset s : sets) {
    const auto est = sample_restriction(session, s, m, basis);
    CompensatedSum acc;
    for (double v : est.values) acc += v;
    const double c = acc.value() / static_cast<double>(m);
    if (c != 0.0) h.coeffs[s] = c;
  }
  return h;
}

inline void sort_sets(std::vector<Subset>& v) {
  std::sort(v.begin(), v.end(), [](Subset a, Subset b) {
    const int sa = set_size(a), sb = set_size(b);
    return sa != sb ? sa < sb : a < b;
  });
}

inline void finish(OracleSession& session, const LearnerConfig& cfg, LearnOutcome& out,
                   std::chrono::steady_clock::time_point start) {
  sort_sets(out.sets);
  out.heldout = evaluate_heldout(session, out, heldout_size(cfg));
  out.audit = session.audit_report();
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

inline nlohmann::json growth_params(int d, double theta, int level_cap, double cap,
                                    double hoeffding, std::size_t used) {
  return {{"d", d},
          {"theta", theta},
          {"level_cap", level_cap},
          {"set_cap", cap},
          {"test_samples_hoeffding", hoeffding},
          {"test_samples_used", used}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Learners.

// Sparse real polynomials over {0,1}^n under smooth distributions: grow sets
// with the non-zero test, then fit monomials by L1-bounded regression.
inline LearnOutcome learn_sparse_poly(OracleSession& session, const LearnerConfig& cfg) {
  cfg.validate();
  if (session.domain() != Domain::zero_one)
    throw ContractViolation("learn_sparse_poly needs a {0,1} session");
  const auto start = std::chrono::steady_clock::now();
  auto p = default_params_sparse(cfg.t, cfg.B, cfg.epsilon, cfg.alpha);
  if (cfg.d) p.d = *cfg.d;
  if (cfg.theta) p.theta = *cfg.theta;
  if (cfg.d_prime) p.d_prime = *cfg.d_prime;
  if (cfg.set_cap) p.set_cap = *cfg.set_cap;
  const int n = session.dimension();
  const int level_cap = std::min({p.d, session.locality(), n});
  const double zeta = cfg.zeta > 0 ? cfg.zeta : 1e-10 * std::max(1.0, cfg.t * cfg.B);
  const double dt = detail::per_test_delta(cfg, n, p.set_cap);
  const double m_h = hoeffding_sample_size(1.0, p.theta / 4.0, dt);
  const std::size_t m = detail::capped(m_h, cfg.max_test_samples);
  const Basis basis = Basis::monomial();

  LearnOutcome out;
  out.algorithm = "sparse-poly";
  out.locality_limited = session.locality() < p.d;
  auto g = grow_sets(session, level_cap, p.set_cap, [&](Subset s) {
    return nonzero_test(session, s, p.theta, zeta, m, basis, cfg.early_accept).pass;
  });
  out.sets = std::move(g.sets);
  out.growth = std::move(g.levels);
  detail::sort_sets(out.sets);
  out.params = detail::growth_params(p.d, p.theta, level_cap, p.set_cap, m_h, m);
  out.params["d_prime"] = p.d_prime;
  out.params["zeta"] = zeta;
  out.params["t"] = cfg.t;
  out.params["B"] = cfg.B;
  out.params["alpha"] = cfg.alpha;
  out.params["epsilon"] = cfg.epsilon;
  out.params["delta"] = cfg.delta;
  out.hypothesis = detail::fit_by_regression(session, out.sets, basis, cfg.t * cfg.B,
                                             cfg.regression_samples, out.regression);
  out.sign_output = false;
  detail::finish(session, cfg, out, start);
  return out;
}

// Depth-d trees over {-1,1}^n under smooth distributions: non-zero test on
// uniform-basis restrictions (noise-corrected when cfg.eta is set), then
// L1-bounded regression with bound t; outputs the sign.
inline LearnOutcome learn_logdepth_tree(OracleSession& session, const LearnerConfig& cfg) {
  cfg.validate();
  if (session.domain() != Domain::plus_minus)
    throw ContractViolation("learn_logdepth_tree needs a +-1 session");
  const auto start = std::chrono::steady_clock::now();
  auto p = default_params_logdepth(cfg.t, cfg.depth, cfg.alpha);
  if (cfg.d) p.d = *cfg.d;
  if (cfg.theta) p.theta = *cfg.theta;
  if (cfg.set_cap) p.set_cap = *cfg.set_cap;
  const int n = session.dimension();
  const int level_cap = std::min({p.d, session.locality(), n});
  const double zeta = cfg.zeta > 0 ? cfg.zeta : 1e-10 * std::max(1.0, static_cast<double>(cfg.t));
  const double dt = detail::per_test_delta(cfg, n, p.set_cap);
  const Basis basis = Basis::uniform();

  LearnOutcome out;
  out.algorithm = "logdepth-tree";
  out.locality_limited = session.locality() < p.d;
  double m_h = hoeffding_sample_size(1.0, p.theta / 4.0, dt);
  std::size_t m = detail::capped(m_h, cfg.max_test_samples);
  GrowthResult g;
  if (cfg.eta && *cfg.eta > 0) {
    const double eta = *cfg.eta;
    // Worst gap over the admissible set sizes sets the sample size.
    double gap = 1.0;
    for (int k = 1; k <= std::max(level_cap, 1); ++k) {
      const int K = 1 << (k - 1);
      gap = std::min(gap, rcn_collision_prob(K, 0, eta) - rcn_collision_prob(K, 1, eta));
    }
    m_h = hoeffding_sample_size(1.0, gap * p.theta / 4.0, dt);
    m = detail::capped(m_h, cfg.max_noisy_test_samples);
    g = grow_sets(session, level_cap, p.set_cap, [&](Subset s) {
      return noisy_nonzero_test(session, s, p.theta, eta, m, zeta).pass;
    });
    out.params["eta"] = eta;
  } else {
    g = grow_sets(session, level_cap, p.set_cap, [&](Subset s) {
      return nonzero_test(session, s, p.theta, zeta, m, basis, cfg.early_accept).pass;
    });
  }
  out.sets = std::move(g.sets);
  out.growth = std::move(g.levels);
  detail::sort_sets(out.sets);
  const auto gp = detail::growth_params(p.d, p.theta, level_cap, p.set_cap, m_h, m);
  out.params.update(gp);
  out.params["zeta"] = zeta;
  out.params["t"] = cfg.t;
  out.params["alpha"] = cfg.alpha;
  out.params["epsilon"] = cfg.epsilon;
  out.params["delta"] = cfg.delta;
  out.hypothesis = detail::fit_by_regression(session, out.sets, basis, static_cast<double>(cfg.t),
                                             cfg.regression_samples, out.regression);
  out.sign_output = true;
  detail::finish(session, cfg, out, start);
  return out;
}

namespace detail {
inline LearnOutcome learn_tree_l2(OracleSession& session, const LearnerConfig& cfg,
                                  const std::string& name, TreeParams p, const Basis& basis) {
  const auto start = std::chrono::steady_clock::now();
  if (cfg.d) p.d = *cfg.d;
  if (cfg.theta) p.theta = *cfg.theta;
  if (cfg.set_cap) p.set_cap = *cfg.set_cap;
  const int n = session.dimension();
  const int level_cap = std::min({p.d, session.locality(), n});
  const double dt = per_test_delta(cfg, n, p.set_cap);
  const double tau = p.theta * p.theta;
  const double m_h = hoeffding_sample_size(1.0, tau / 4.0, dt);
  const std::size_t m = capped(m_h, cfg.max_test_samples);

  LearnOutcome out;
  out.algorithm = name;
  out.locality_limited = session.locality() < p.d;
  auto g = grow_sets(session, level_cap, p.set_cap, [&](Subset s) {
    return l2_test(session, s, p.theta, m, basis, cfg.early_accept).pass;
  });
  out.sets = std::move(g.sets);
  out.growth = std::move(g.levels);
  sort_sets(out.sets);
  out.params = growth_params(p.d, p.theta, level_cap, p.set_cap, m_h, m);
  // Coefficients to additive theta/4; restriction values lie in [-1, 1].
  const double mc_h = hoeffding_sample_size(2.0, p.theta / 4.0, per_test_delta(cfg, 1, p.set_cap));
  const std::size_t mc = capped(mc_h, cfg.max_coef_samples);
  out.params["coef_samples_hoeffding"] = mc_h;
  out.params["coef_samples_used"] = mc;
  out.params["t"] = cfg.t;
  out.params["epsilon"] = cfg.epsilon;
  out.params["delta"] = cfg.delta;
  out.hypothesis = coefficients_by_restriction(session, out.sets, basis, mc);
  out.sign_output = true;
  finish(session, cfg, out, start);
  return out;
}
}  // namespace detail

// t-leaf trees under the uniform distribution, L2 test in the uniform basis.
inline LearnOutcome learn_tree_uniform(OracleSession& session, const LearnerConfig& cfg) {
  cfg.validate();
  if (session.domain() != Domain::plus_minus)
    throw ContractViolation("learn_tree_uniform needs a +-1 session");
  return detail::learn_tree_l2(session, cfg, "tree-uniform",
                               default_params_tree_uniform(cfg.t, cfg.epsilon), Basis::uniform());
}

// t-leaf trees under a product distribution, L2 test in the chi^mu basis. The
// means are read from the session's declared distribution.
inline LearnOutcome learn_tree_product(OracleSession& session, const LearnerConfig& cfg) {
  cfg.validate();
  if (session.domain() != Domain::plus_minus)
    throw ContractViolation("learn_tree_product needs a +-1 session");
  const Distribution* dist = session.distribution();
  if (!dist || !dist->is_product())
    throw ContractViolation("learn_tree_product needs a product distribution");
  const auto mu = dist->means();
  double worst = 0;
  for (double v : mu) worst = std::max(worst, std::abs(v));
  const double c = cfg.c ? *cfg.c : (1.0 - worst) / 2.0;
  if (!(c > 0)) throw ConfigError("learn_tree_product: c must be positive");
  if (worst > 1.0 - 2.0 * c + 1e-12)
    throw ConfigError("learn_tree_product: a mean lies outside [-1 + 2c, 1 - 2c]");
  auto p = default_params_tree_product(cfg.t, cfg.epsilon, c);
  p.set_cap = std::min(p.set_cap, count_small_sets(session.dimension(), p.d));
  auto out = detail::learn_tree_l2(session, cfg, "tree-product", p, Basis::product(mu));
  out.params["c"] = c;
  return out;
}

// Size-s DNF under the uniform distribution. Heavy low-degree coefficients
// are found with the L2 test and estimated from one shared example sample;
// the hypothesis is the sign of their sum.
inline LearnOutcome learn_dnf(OracleSession& session, const LearnerConfig& cfg) {
  cfg.validate();
  if (session.domain() != Domain::plus_minus)
    throw ContractViolation("learn_dnf needs a +-1 session");
  const auto start = std::chrono::steady_clock::now();
  auto p = default_params_dnf(cfg.s, cfg.epsilon);
  if (cfg.d) p.d = *cfg.d;
  if (cfg.theta) p.theta = *cfg.theta;
  if (cfg.set_cap) p.set_cap = *cfg.set_cap;
  const int n = session.dimension();
  const int level_cap = std::min({p.d, session.locality(), n});
  const double dt = detail::per_test_delta(cfg, n, p.set_cap);
  const double m_h = hoeffding_sample_size(1.0, p.theta * p.theta / 4.0, dt);
  const std::size_t m = detail::capped(m_h, cfg.max_test_samples);
  const Basis basis = Basis::uniform();

  LearnOutcome out;
  out.algorithm = "dnf";
  out.locality_limited = session.locality() < p.d;
  auto g = grow_sets(session, level_cap, p.set_cap, [&](Subset s) {
    return l2_test(session, s, p.theta, m, basis, cfg.early_accept).pass;
  });
  out.sets = std::move(g.sets);
  out.growth = std::move(g.levels);
  detail::sort_sets(out.sets);
  out.params = detail::growth_params(p.d, p.theta, level_cap, p.set_cap, m_h, m);

  const std::size_t N = cfg.dnf_coef_samples;
  std::vector<std::uint32_t> xs(N);
  std::vector<double> ys(N);
  for (std::size_t j = 0; j < N; ++j) {
    const auto ex = session.draw_example();
    xs[j] = ex.bits;
    ys[j] = ex.label;
  }
  const double keep = p.theta / 2.0;
  FourierSpectrum h{n, basis, {}};
  for (Subset s : out.sets) {
    CompensatedSum acc;
    for (std::size_t j = 0; j < N; ++j) acc += parity_sign(s, xs[j]) * ys[j];
    const double c = acc.value() / static_cast<double>(N);
    if (std::abs(c) >= keep) h.coeffs[s] = c;
  }
  out.hypothesis = std::move(h);
  out.params["coef_samples"] = N;
  out.params["coef_keep_threshold"] = keep;
  out.params["s"] = cfg.s;
  out.params["epsilon"] = cfg.epsilon;
  out.params["delta"] = cfg.delta;
  out.sign_output = true;
  out.substitution =
      "sign of the estimated heavy low-degree Fourier expansion stands in for the external "
      "DNF reconstruction step";
  detail::finish(session, cfg, out, start);
  return out;
}

}  // namespace localmq
