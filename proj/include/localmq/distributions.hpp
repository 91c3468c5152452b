#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/numerics.hpp"
#include "localmq/random.hpp"

namespace localmq {

enum class DistKind { uniform, product, table };

inline std::string to_string(DistKind k) {
  switch (k) {
    case DistKind::uniform: return "uniform";
    case DistKind::product: return "product";
    case DistKind::table: return "table";
  }
  return "?";
}

// Distribution over the n-cube. Product parameters are stored as
// p_i = Pr[bit i is high]; on the +-1 cube the mean is mu_i = 2 p_i - 1.
class Distribution {
 public:
  static Distribution uniform(int n, Domain domain) {
    check_dimension(n);
    return Distribution(DistKind::uniform, n, domain);
  }

  static Distribution product_from_high_probs(std::vector<double> p, Domain domain) {
    const int n = static_cast<int>(p.size());
    check_dimension(n);
    for (double v : p)
      if (!(v > 0.0 && v < 1.0))
        throw ContractViolation("product distribution: Pr[bit = high] must lie in (0, 1)");
    Distribution d(DistKind::product, n, domain);
    d.high_ = std::move(p);
    return d;
  }

  // means: p_i for zero_one, mu_i for plus_minus.
  static Distribution product(const std::vector<double>& means, Domain domain) {
    std::vector<double> p(means);
    if (domain == Domain::plus_minus) {
      for (double m : means)
        if (!(m > -1.0 && m < 1.0))
          throw ContractViolation("product distribution: mu_i must lie in (-1, 1)");
      for (auto& v : p) v = (v + 1.0) / 2.0;
    }
    return product_from_high_probs(std::move(p), domain);
  }

  static Distribution table(int n, Domain domain, std::vector<double> probs) {
    check_dimension(n, kMaxEnumerationDimension);
    if (probs.size() != (std::size_t{1} << n))
      throw ContractViolation("table distribution needs exactly 2^n probabilities");
    CompensatedSum total;
    for (double v : probs) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ContractViolation("table distribution: probabilities must be finite and >= 0");
      if (v != 0.0 && v < 1e-300)
        throw ContractViolation("table distribution: probability below 1e-300");
      total += v;
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
      throw ContractViolation("table distribution: probabilities sum to " +
                              std::to_string(total.value()) + ", not 1");
    Distribution d(DistKind::table, n, domain);
    auto cdf = std::make_shared<std::vector<double>>(probs.size());
    CompensatedSum run;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      run += probs[i];
      (*cdf)[i] = run.value();
    }
    d.probs_ = std::make_shared<const std::vector<double>>(std::move(probs));
    d.cdf_ = std::move(cdf);
    d.alpha_cache_ = d.scan_smoothness();
    return d;
  }

  DistKind kind() const { return kind_; }
  int dimension() const { return n_; }
  Domain domain() const { return domain_; }

  // p_i = Pr[x_i high]; uniform gives 1/2. Table: exact marginal.
  double high_prob(int i) const {
    switch (kind_) {
      case DistKind::uniform: return 0.5;
      case DistKind::product: return high_[static_cast<std::size_t>(i)];
      case DistKind::table: {
        CompensatedSum s;
        const auto& pr = *probs_;
        for (std::size_t x = 0; x < pr.size(); ++x)
          if ((x >> i) & 1u) s += pr[x];
        return s.value();
      }
    }
    return 0.5;
  }

  // Product/uniform: means in the domain's convention (p_i or mu_i).
  std::vector<double> means() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const double p = high_prob(i);
      out[static_cast<std::size_t>(i)] = domain_ == Domain::plus_minus ? 2.0 * p - 1.0 : p;
    }
    return out;
  }

  bool is_product() const { return kind_ != DistKind::table; }

  double prob(std::uint32_t bits) const {
    switch (kind_) {
      case DistKind::uniform: return std::ldexp(1.0, -n_);
      case DistKind::product: {
        double v = 1.0;
        for (int i = 0; i < n_; ++i) {
          const double p = high_[static_cast<std::size_t>(i)];
          v *= contains(bits, i) ? p : 1.0 - p;
        }
        return v;
      }
      case DistKind::table: return (*probs_)[bits];
    }
    return 0.0;
  }

  const std::vector<double>& table_probs() const {
    if (kind_ != DistKind::table) throw ContractViolation("not a table distribution");
    return *probs_;
  }

  // Tightest alpha with D(x)/D(x') <= alpha over Hamming neighbours.
  double verify_smoothness() const {
    switch (kind_) {
      case DistKind::uniform: return 1.0;
      case DistKind::product: {
        double a = 1.0;
        for (double p : high_) a = std::max({a, p / (1.0 - p), (1.0 - p) / p});
        return a;
      }
      case DistKind::table: return alpha_cache_;
    }
    return 1.0;
  }

  template <typename Rng>
  std::uint32_t sample(Rng& rng) const {
    switch (kind_) {
      case DistKind::uniform:
        return n_ == 0 ? 0u : static_cast<std::uint32_t>(rng() >> (64 - n_));
      case DistKind::product: {
        std::uint32_t b = 0;
        for (int i = 0; i < n_; ++i)
          if (uniform01(rng) < high_[static_cast<std::size_t>(i)]) b |= std::uint32_t{1} << i;
        return b;
      }
      case DistKind::table: {
        const double u = uniform01(rng) * cdf_->back();
        auto it = std::upper_bound(cdf_->begin(), cdf_->end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cdf_->begin());
        if (idx >= cdf_->size()) idx = cdf_->size() - 1;
        // Skip zero-mass cells that share a CDF value with a positive one.
        while ((*probs_)[idx] == 0.0 && idx + 1 < cdf_->size()) ++idx;
        return static_cast<std::uint32_t>(idx);
      }
    }
    return 0;
  }

  template <typename Rng>
  Point sample_point(Rng& rng) const {
    return Point(sample(rng), n_, domain_);
  }

  // Sum of D(x) over points satisfying the predicate, by enumeration.
  double exact_event_prob(const std::function<bool(std::uint32_t)>& pred) const {
    check_dimension(n_, kMaxEnumerationDimension);
    CompensatedSum s;
    const std::uint32_t N = std::uint32_t{1} << n_;
    for (std::uint32_t x = 0; x < N; ++x)
      if (pred(x)) s += prob(x);
    return s.value();
  }

  // Full table of probabilities (any variant), n <= 20.
  std::vector<double> to_table() const {
    check_dimension(n_, kMaxEnumerationDimension);
    if (kind_ == DistKind::table) return *probs_;
    std::vector<double> out(std::size_t{1} << n_);
    for (std::uint32_t x = 0; x < out.size(); ++x) out[x] = prob(x);
    return out;
  }

  // (D | x_S = b_S) marginalised onto the complement of S, packed in
  // increasing variable order.
  Distribution conditional_marginal(Subset s, std::uint32_t b_s) const {
    if ((s & ~full_set(n_)) != 0) throw ContractViolation("conditioning set outside [n]");
    b_s &= s;
    const auto keep = elements(full_set(n_) & ~s);
    const int m = static_cast<int>(keep.size());
    if (kind_ == DistKind::uniform) return uniform(m, domain_);
    if (kind_ == DistKind::product) {
      std::vector<double> p;
      for (int i : keep) p.push_back(high_[static_cast<std::size_t>(i)]);
      return product_from_high_probs(std::move(p), domain_);
    }
    std::vector<double> out(std::size_t{1} << m, 0.0);
    std::vector<CompensatedSum> acc(out.size());
    const auto& pr = *probs_;
    CompensatedSum mass;
    for (std::uint32_t x = 0; x < pr.size(); ++x) {
      if ((x & s) != b_s) continue;
      acc[pack(x, keep)] += pr[x];
      mass += pr[x];
    }
    if (!(mass.value() > 0.0))
      throw ContractViolation("conditional_marginal: conditioning event has zero mass");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value() / mass.value();
    renormalise(out);
    return table(m, domain_, std::move(out));
  }

  // Marginal onto the complement of S.
  Distribution marginal(Subset s) const {
    const auto keep = elements(full_set(n_) & ~s);
    const int m = static_cast<int>(keep.size());
    if (kind_ == DistKind::uniform) return uniform(m, domain_);
    if (kind_ == DistKind::product) {
      std::vector<double> p;
      for (int i : keep) p.push_back(high_[static_cast<std::size_t>(i)]);
      return product_from_high_probs(std::move(p), domain_);
    }
    std::vector<CompensatedSum> acc(std::size_t{1} << m);
    const auto& pr = *probs_;
    for (std::uint32_t x = 0; x < pr.size(); ++x) acc[pack(x, keep)] += pr[x];
    std::vector<double> out(acc.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = acc[i].value();
    renormalise(out);
    return table(m, domain_, std::move(out));
  }

  static std::uint32_t pack(std::uint32_t x, const std::vector<int>& keep) {
    std::uint32_t y = 0;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if ((x >> keep[j]) & 1u) y |= std::uint32_t{1} << j;
    return y;
  }

 private:
  Distribution(DistKind k, int n, Domain d) : kind_(k), n_(n), domain_(d) {}

  static void renormalise(std::vector<double>& v) {
    CompensatedSum s;
    for (double x : v) s += x;
    const double z = s.value();
    for (auto& x : v) x /= z;
  }

  double scan_smoothness() const {
    const auto& pr = *probs_;
    double a = 1.0;
    for (std::uint32_t x = 0; x < pr.size(); ++x)
      for (int i = 0; i < n_; ++i) {
        const std::uint32_t y = x ^ (std::uint32_t{1} << i);
        if (y < x) continue;
        const double px = pr[x], py = pr[y];
        if (px == 0.0 && py == 0.0) continue;
        if (px == 0.0 || py == 0.0) return std::numeric_limits<double>::infinity();
        a = std::max({a, px / py, py / px});
      }
    return a;
  }

  DistKind kind_;
  int n_;
  Domain domain_;
  std::vector<double> high_;
  std::shared_ptr<const std::vector<double>> probs_;
  std::shared_ptr<const std::vector<double>> cdf_;
  double alpha_cache_ = 1.0;
};

// Random locally alpha-smooth table: log D(x) = sum_i w_i x_i + sum_{ij in E}
// w_ij x_i x_j over x in {0,1}^n, with |w_i| + sum_j |w_ij| = log(alpha) for
// the most constrained coordinate. Pairs form a random graph of average
// degree about `avg_degree`.
template <typename Rng>
Distribution random_smooth_table(int n, Domain domain, double alpha, Rng& rng,
                                 double avg_degree = 2.0) {
  check_dimension(n, kMaxEnumerationDimension);
  if (!(alpha >= 1.0)) throw ContractViolation("alpha must be at least 1");
  std::vector<double> w(static_cast<std::size_t>(n));
  struct Edge { int i, j; double w; };
  std::vector<Edge> edges;
  for (auto& v : w) v = 2.0 * uniform01(rng) - 1.0;
  const double p_edge = n > 1 ? std::min(1.0, avg_degree / (n - 1)) : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform01(rng) < p_edge) edges.push_back({i, j, 2.0 * uniform01(rng) - 1.0});
  std::vector<double> load(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) load[static_cast<std::size_t>(i)] = std::abs(w[static_cast<std::size_t>(i)]);
  for (const auto& e : edges) {
    load[static_cast<std::size_t>(e.i)] += std::abs(e.w);
    load[static_cast<std::size_t>(e.j)] += std::abs(e.w);
  }
  const double peak = n > 0 ? *std::max_element(load.begin(), load.end()) : 0.0;
  const double scale = peak > 0 ? std::log(alpha) / peak : 0.0;
  const std::size_t N = std::size_t{1} << n;
  std::vector<double> logp(N);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::uint32_t x = 0; x < N; ++x) {
    double l = 0;
    for (int i = 0; i < n; ++i)
      if (contains(x, i)) l += w[static_cast<std::size_t>(i)];
    for (const auto& e : edges)
      if (contains(x, e.i) && contains(x, e.j)) l += e.w;
    logp[x] = l * scale;
    mx = std::max(mx, logp[x]);
  }
  std::vector<double> probs(N);
  CompensatedSum z;
  for (std::size_t x = 0; x < N; ++x) {
    probs[x] = std::exp(logp[x] - mx);
    z += probs[x];
  }
  for (auto& v : probs) v /= z.value();
  return Distribution::table(n, domain, std::move(probs));
}

// Convex combination of tables over the same cube.
inline Distribution mixture(const std::vector<Distribution>& parts,
                            const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw ContractViolation("mixture: need one weight per component");
  const int n = parts.front().dimension();
  const Domain dom = parts.front().domain();
  std::vector<CompensatedSum> acc(std::size_t{1} << n);
  CompensatedSum wsum;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation("mixture: negative weight");
    wsum += w;
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].dimension() != n) throw ContractViolation("mixture: dimension mismatch");
    const auto t = parts[k].to_table();
    for (std::size_t x = 0; x < t.size(); ++x) acc[x] += weights[k] / wsum.value() * t[x];
  }
  std::vector<double> out(acc.size());
  CompensatedSum z;
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = acc[x].value();
    z += out[x];
  }
  for (auto& v : out) v /= z.value();
  return Distribution::table(n, dom, std::move(out));
}

inline nlohmann::json to_json(const Distribution& d) {
  nlohmann::json j{{"kind", to_string(d.kind())},
                   {"n", d.dimension()},
                   {"domain", std::string(to_string(d.domain()))}};
  if (d.kind() == DistKind::product) j["means"] = d.means();
  if (d.kind() == DistKind::table) {
    j["probs"] = d.table_probs();
    j["alpha"] = d.verify_smoothness();
  }
  return j;
}

inline Distribution distribution_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  const Domain domain = domain_from_string(j.value("domain", std::string("plus_minus")));
  if (kind == "uniform") return Distribution::uniform(n, domain);
  if (kind == "product") {
    auto means = j.at("means").get<std::vector<double>>();
    if (static_cast<int>(means.size()) != n)
      throw ContractViolation("product distribution: means length differs from n");
    return Distribution::product(means, domain);
  }
  if (kind == "table") return Distribution::table(n, domain, j.at("probs").get<std::vector<double>>());
  throw ContractViolation("unknown distribution kind '" + kind + "'");
}

}  // namespace localmq
