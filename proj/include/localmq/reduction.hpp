#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/errors.hpp"
#include "localmq/numerics.hpp"
#include "localmq/oracles.hpp"
#include "localmq/random.hpp"
#include "localmq/targets.hpp"

namespace localmq {

// Systematic binary linear code: z = x . e(x), message in bits 0..n-1 and
// check bits above; message bit i adds cols[i] into e(x).
class LinearCode {
 public:
  LinearCode(int n, int k, std::vector<std::uint32_t> cols, int check_bits, std::string family)
      : n_(n), k_(k), r_(check_bits), cols_(std::move(cols)), family_(std::move(family)) {
    if (n < 1) throw ContractViolation("code: message length must be positive");
    if (static_cast<int>(cols_.size()) != n) throw ContractViolation("code: one column per message bit");
    if (n + r_ > kMaxDimension)
      throw ConfigError("code: codeword length " + std::to_string(n + r_) + " exceeds " +
                        std::to_string(kMaxDimension) + " bits");
    for (auto c : cols_)
      if (r_ < 32 && (c >> r_) != 0) throw ContractViolation("code: column wider than the check part");
    distance_ = compute_distance();
    if (distance_ < 2 * k_ + 1)
      throw ContractViolation("code: distance " + std::to_string(distance_) + " < 2k+1");
    build_table();
  }

  int message_length() const { return n_; }
  int length() const { return n_ + r_; }
  int radius() const { return k_; }
  int check_bits() const { return r_; }
  int distance() const { return distance_; }
  int padding() const { return pad_; }
  const std::string& family() const { return family_; }
  const std::vector<std::uint32_t>& columns() const { return cols_; }

  std::uint32_t check_part(std::uint32_t x) const {
    std::uint32_t e = 0;
    for (std::uint32_t r = x & full_set(n_); r; r &= r - 1) e ^= cols_[static_cast<std::size_t>(std::countr_zero(r))];
    return e;
  }
  std::uint32_t encode(std::uint32_t x) const { return (x & full_set(n_)) | (check_part(x) << n_); }
  std::uint32_t syndrome(std::uint32_t z) const { return check_part(z) ^ (z >> n_); }
  bool is_codeword(std::uint32_t z) const { return syndrome(z) == 0; }

  // Message whose codeword lies within distance k of z, if any.
  std::optional<std::uint32_t> decode(std::uint32_t z) const {
    auto it = table_.find(syndrome(z));
    if (it == table_.end()) return std::nullopt;
    return (z ^ it->second) & full_set(n_);
  }

  // Same code with `extra` constant-0 bits appended to every codeword.
  LinearCode padded(int extra) const {
    if (extra < 0) throw ContractViolation("padding must be nonnegative");
    LinearCode c = *this;
    c.r_ += extra;
    c.pad_ += extra;
    if (c.n_ + c.r_ > kMaxDimension)
      throw ConfigError("code: padded length exceeds " + std::to_string(kMaxDimension) + " bits");
    c.build_table();
    return c;
  }

  // Generator matrix rows (one per message bit) as bit strings of length m.
  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n_; ++i)
      rows.push_back(Point(encode(std::uint32_t{1} << i), length(), Domain::zero_one).bitstring());
    return {{"n", n_},
            {"m", length()},
            {"k", k_},
            {"distance", distance_},
            {"padding", pad_},
            {"family", family_},
            {"generator", rows}};
  }

 private:
  int compute_distance() const {
    check_dimension(n_, kMaxEnumerationDimension);
    int best = length();
    // Gray-code walk over all nonzero messages.
    std::uint32_t x = 0, e = 0;
    for (std::uint32_t g = 1; g < (std::uint32_t{1} << n_); ++g) {
      const int i = std::countr_zero(g);
      x ^= std::uint32_t{1} << i;
      e ^= cols_[static_cast<std::size_t>(i)];
      best = std::min(best, std::popcount(x) + std::popcount(e));
    }
    return best;
  }

  void build_table() {
    table_.clear();
    const int m = length();
    auto rec = [&](auto&& self, int start, int left, std::uint32_t err) -> void {
      table_.emplace(syndrome(err), err);
      if (left == 0) return;
      for (int b = start; b < m; ++b) self(self, b + 1, left - 1, err | (std::uint32_t{1} << b));
    };
    rec(rec, 0, k_, 0);
    const std::size_t expect = static_cast<std::size_t>(std::llround([&] {
      double s = 0;
      for (int i = 0; i <= k_; ++i) s += binomial(m, i);
      return s;
    }()));
    if (table_.size() != expect) throw ContractViolation("code: syndromes of correctable errors collide");
  }

  int n_, k_, r_;
  std::vector<std::uint32_t> cols_;
  std::string family_;
  int distance_ = 0;
  int pad_ = 0;
  std::unordered_map<std::uint32_t, std::uint32_t> table_;
};

namespace detail {

// GF(2)[x] polynomials as bit masks.
inline std::uint64_t gf2_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a <<= 1;
    b >>= 1;
  }
  return r;
}
inline int gf2_deg(std::uint64_t a) { return a ? 63 - std::countl_zero(a) : -1; }
inline std::uint64_t gf2_mod(std::uint64_t a, std::uint64_t g) {
  const int dg = gf2_deg(g);
  for (int d = gf2_deg(a); d >= dg; d = gf2_deg(a)) a ^= g << (d - dg);
  return a;
}

inline std::uint32_t primitive_poly(int r) {
  switch (r) {
    case 2: return 0b111;
    case 3: return 0b1011;
    case 4: return 0b10011;
    case 5: return 0b100101;
    case 6: return 0b1000011;
    case 7: return 0b10001001;
    case 8: return 0b100011101;
    case 9: return 0b1000010001;
    case 10: return 0b10000001001;
    default: throw ConfigError("no primitive polynomial tabulated for GF(2^" + std::to_string(r) + ")");
  }
}

// Generator of the narrow-sense binary BCH code of length 2^r - 1 and designed
// distance 2k + 1: the product of the distinct minimal polynomials of
// alpha^1 .. alpha^{2k}.
inline std::uint64_t bch_generator(int r, int k) {
  const int N = (1 << r) - 1;
  const std::uint32_t prim = primitive_poly(r);
  std::vector<int> exp(2 * N), log(N + 1, 0);
  int v = 1;
  for (int i = 0; i < N; ++i) {
    exp[i] = exp[i + N] = v;
    log[v] = i;
    v <<= 1;
    if (v & (1 << r)) v ^= static_cast<int>(prim);
  }
  auto mul = [&](int a, int b) { return (a == 0 || b == 0) ? 0 : exp[log[a] + log[b]]; };
  std::vector<bool> used(N, false);
  std::uint64_t g = 1;
  for (int j = 1; j <= 2 * k; ++j) {
    if (used[j % N]) continue;
    // Coefficients over GF(2^r) of prod_{c in coset(j)} (x + alpha^c).
    std::vector<int> poly{1};
    for (int c = j % N;; c = (2 * c) % N) {
      if (used[c]) break;
      used[c] = true;
      std::vector<int> next(poly.size() + 1, 0);
      for (std::size_t a = 0; a < poly.size(); ++a) {
        next[a + 1] ^= poly[a];
        next[a] ^= mul(poly[a], exp[c]);
      }
      poly = std::move(next);
    }
    std::uint64_t mp = 0;
    for (std::size_t a = 0; a < poly.size(); ++a) {
      if (poly[a] > 1) throw ContractViolation("minimal polynomial has a non-binary coefficient");
      if (poly[a]) mp |= std::uint64_t{1} << a;
    }
    g = gf2_mul(g, mp);
    if (gf2_deg(g) > 40) throw ConfigError("BCH generator degree too large");
  }
  return g;
}

inline LinearCode shortened_bch(int n, int k) {
  for (int r = 2; r <= 10; ++r) {
    const int N = (1 << r) - 1;
    if (2 * k + 1 > N) continue;
    const std::uint64_t g = bch_generator(r, k);
    const int deg = gf2_deg(g);
    if (N - deg < n) continue;
    // Systematic form: message bit i maps to x^{i + deg} mod g.
    std::vector<std::uint32_t> cols(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      cols[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(gf2_mod(std::uint64_t{1} << (i + deg), g));
    return LinearCode(n, k, std::move(cols), deg, "bch");
  }
  throw ConfigError("no BCH code found for n=" + std::to_string(n) + ", k=" + std::to_string(k));
}

inline LinearCode shortened_hamming(int n) {
  int r = 2;
  while ((1 << r) - 1 - r < n) ++r;
  std::vector<std::uint32_t> cols;
  for (std::uint32_t v = 3; cols.size() < static_cast<std::size_t>(n); ++v)
    if (std::popcount(v) >= 2) cols.push_back(v);
  return LinearCode(n, 1, std::move(cols), r, "hamming");
}

inline LinearCode random_code(int n, int k, int max_m, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (int r = 2 * k; n + r <= max_m; ++r) {
    // Sphere-packing bound rules out short check parts.
    double ball = 0;
    for (int i = 0; i <= k; ++i) ball += binomial(n + r, i);
    if (std::exp2(r) < ball) continue;
    for (int attempt = 0; attempt < 400; ++attempt) {
      std::vector<std::uint32_t> cols(static_cast<std::size_t>(n));
      for (auto& c : cols) c = static_cast<std::uint32_t>(rng()) & full_set(r);
      try {
        return LinearCode(n, k, cols, r, "random");
      } catch (const ContractViolation&) {
      }
    }
  }
  throw ConfigError("no random linear code of distance " + std::to_string(2 * k + 1) + " within m <= " +
                    std::to_string(max_m));
}

}  // namespace detail

// Distance >= 2k+1 code for n-bit messages: identity for k = 0, shortened
// Hamming for k = 1, shortened BCH beyond, random systematic codes when asked
// or as a fallback. Length budget n + k ceil(log2 n) + 2k + 1.
inline LinearCode build_code(int n, int k, const std::string& family = "auto", std::uint64_t seed = 1) {
  if (n < 1 || n > 16) throw ConfigError("build_code: message length must lie in [1, 16]");
  if (k < 0 || k > 3) throw ConfigError("build_code: k must lie in [0, 3]");
  const int budget = std::min(kMaxDimension,
                              n + k * static_cast<int>(std::ceil(std::log2(std::max(n, 2)))) + 2 * k + 1);
  if (k == 0) return LinearCode(n, 0, std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0), 0, "identity");
  auto fits = [&](const LinearCode& c) { return c.length() <= budget; };
  if (family == "random") return detail::random_code(n, k, budget, seed);
  if (family == "hamming" && k != 1) throw ConfigError("Hamming codes only correct one error");
  if (family == "auto" || family == "hamming" || family == "bch") {
    try {
      auto c = (k == 1 && family != "bch") ? detail::shortened_hamming(n) : detail::shortened_bch(n, k);
      if (fits(c)) return c;
    } catch (const ConfigError&) {
      if (family != "auto") throw;
    }
    if (family != "auto") throw ConfigError("structured code exceeds the length budget");
    return detail::random_code(n, k, budget, seed);
  }
  throw ConfigError("unknown code family '" + family + "'");
}

// |{z : d(z, C) <= k}| / 2^m = 2^n sum_{i<=k} C(m, i) / 2^m.
inline double ball_fraction(int n, int m, int k) {
  double ball = 0;
  for (int i = 0; i <= k; ++i) ball += binomial(m, i);
  return std::ldexp(ball, n - m);
}

// Appends constant-0 bits until the covered fraction beta is at most 2/3.
inline LinearCode pad_for_sampling(const LinearCode& code) {
  int extra = 0;
  while (ball_fraction(code.message_length(), code.length() + extra, code.radius()) > 2.0 / 3.0) ++extra;
  return extra ? code.padded(extra) : code;
}

// f_e over m bits: f(x) on the codeword x . e(x), 0 elsewhere. The 0 value is
// read as a fair coin fixed per point.
class EmbeddedFunction {
 public:
  EmbeddedFunction(TargetFunction base, LinearCode code, std::uint64_t coin_seed)
      : base_(std::move(base)), code_(std::move(code)), coin_(coin_seed, 0x636f696eULL) {
    if (dimension(base_) != code_.message_length())
      throw ContractViolation("embedding: target dimension differs from the message length");
    if (domain_of(base_) != Domain::plus_minus || !is_boolean(base_))
      throw ContractViolation("embedding: base target must be a Boolean +-1 function");
  }

  const LinearCode& code() const { return code_; }
  const TargetFunction& base() const { return base_; }
  int n() const { return code_.message_length(); }
  int m() const { return code_.length(); }

  // Values in {-1, 0, +1}.
  double value(std::uint32_t z) const {
    return code_.is_codeword(z) ? evaluate_bits(base_, z & full_set(n())) : 0.0;
  }
  double coin(std::uint32_t z) const { return coin_.coin(z); }
  // f_e with every 0 replaced by its persistent coin.
  double label(std::uint32_t z) const {
    const double v = value(z);
    return v != 0.0 ? v : coin(z);
  }

 private:
  TargetFunction base_;
  LinearCode code_;
  KeyedPrf coin_;
};

// Simulates EX(f_e, U_m) and k-local MQs to f_e from EX(f, U_n) alone. The
// returned CustomOracle refers to this object, which must outlive it.
class EmbeddingSimulator {
 public:
  EmbeddingSimulator(const EmbeddedFunction& emb, OracleSession& base)
      : emb_(emb), base_(base) {
    if (base.dimension() != emb.n() || base.domain() != Domain::plus_minus)
      throw ContractViolation("simulator: base session must be over the message cube");
    beta_ = ball_fraction(emb.n(), emb.m(), emb.code().radius());
    if (beta_ > 2.0 / 3.0 + 1e-12)
      throw ContractViolation("simulator: beta exceeds 2/3; pad the code first");
    const int m = emb.m(), k = emb.code().radius();
    double total = 0;
    for (int w = 0; w <= k; ++w) total += binomial(m, w);
    for (int w = 0; w <= k; ++w) weight_cdf_.push_back((w ? weight_cdf_.back() : 0.0) + binomial(m, w) / total);
    max_tries_ = static_cast<std::size_t>(std::ceil(64.0 / (1.0 - beta_)));
  }
  EmbeddingSimulator(const EmbeddingSimulator&) = delete;
  EmbeddingSimulator& operator=(const EmbeddingSimulator&) = delete;

  double beta() const { return beta_; }
  std::size_t covered_draws() const { return covered_; }
  std::size_t uncovered_draws() const { return uncovered_; }
  const std::map<std::size_t, std::size_t>& tries_histogram() const { return tries_; }
  std::size_t answered_queries() const { return answered_; }

  std::pair<std::uint32_t, double> simulate_example(SplitMix64& rng) {
    const int m = emb_.m();
    if (uniform01(rng) < beta_) {
      ++covered_;
      const auto ex = base_.draw_example();
      const std::uint32_t c = emb_.code().encode(ex.bits);
      // Uniform point of the radius-k ball: weight by C(m, w), then a uniform
      // w-subset.
      const double u = uniform01(rng);
      int w = 0;
      while (w + 1 < static_cast<int>(weight_cdf_.size()) && u >= weight_cdf_[static_cast<std::size_t>(w)]) ++w;
      std::uint32_t flip = 0;
      for (int placed = 0; placed < w;) {
        const auto b = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(m)));
        if (!contains(flip, b)) {
          flip |= std::uint32_t{1} << b;
          ++placed;
        }
      }
      const std::uint32_t z = c ^ flip;
      labels_[c] = ex.label;
      if (z == c) return {z, ex.label};
      return {z, emb_.coin(z)};
    }
    ++uncovered_;
    for (std::size_t tries = 1; tries <= max_tries_; ++tries) {
      const auto z = static_cast<std::uint32_t>(rng() >> (64 - m));
      if (!emb_.code().decode(z)) {
        ++tries_[tries];
        return {z, emb_.coin(z)};
      }
    }
    throw RetryableError("simulator: rejection sampling exceeded its try budget");
  }

  // Label of a k-local query. Only a codeword carries a base label, and the
  // only codeword within 2k of a covered example is its own centre.
  double respond(std::uint32_t z) {
    ++answered_;
    if (!emb_.code().is_codeword(z)) return emb_.coin(z);
    auto it = labels_.find(z);
    if (it != labels_.end()) return it->second;
    throw ContractViolation("simulator: codeword query not justified by any simulated example");
  }

  CustomOracle oracle() {
    CustomOracle o;
    o.n = emb_.m();
    o.domain = Domain::plus_minus;
    o.draw = [this](SplitMix64& rng) { return simulate_example(rng); };
    o.respond = [this](std::uint32_t z) { return respond(z); };
    return o;
  }

  nlohmann::json report() const {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [t, c] : tries_) hist[std::to_string(t)] = c;
    return {{"beta", beta_},
            {"covered_draws", covered_},
            {"uncovered_draws", uncovered_},
            {"tries_histogram", hist},
            {"answered_queries", answered_}};
  }

 private:
  const EmbeddedFunction& emb_;
  OracleSession& base_;
  double beta_ = 0;
  std::vector<double> weight_cdf_;
  std::size_t max_tries_ = 64;
  std::size_t covered_ = 0, uncovered_ = 0, answered_ = 0;
  std::map<std::size_t, std::size_t> tries_;
  std::unordered_map<std::uint32_t, double> labels_;  // centre codeword -> base label
};

struct CorrelationResult {
  double lhs = 0;
  double rhs = 0;
  double residual() const { return std::abs(lhs - rhs); }
};

// E_{U_m}[f_e(z) g(x)] for z = x . y, against 2^{n-m} E_{U_n}[f g]; exact.
inline CorrelationResult correlation_check(const TargetFunction& f, const TargetFunction& g,
                                           const LinearCode& code) {
  const int n = code.message_length(), m = code.length();
  if (dimension(f) != n || dimension(g) != n)
    throw ContractViolation("correlation_check: targets must live on the message cube");
  check_dimension(m, kMaxEnumerationDimension);
  EmbeddedFunction emb(f, code, 0);
  CompensatedSum l, r;
  for (std::uint32_t z = 0; z < (std::uint32_t{1} << m); ++z) {
    const double v = emb.value(z);
    if (v != 0.0) l += v * evaluate_bits(g, z & full_set(n));
  }
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) r += evaluate_bits(f, x) * evaluate_bits(g, x);
  return {std::ldexp(l.value(), -m), std::ldexp(r.value(), -m)};
}

// E_{U_m}[f_e h] against 2^{n-m} E_{U_n}[f(x) h(x . e(x))] for h on m bits.
inline CorrelationResult correlation_check_lifted(const TargetFunction& f,
                                                  const std::function<double(std::uint32_t)>& h,
                                                  const LinearCode& code) {
  const int n = code.message_length(), m = code.length();
  check_dimension(m, kMaxEnumerationDimension);
  EmbeddedFunction emb(f, code, 0);
  CompensatedSum l, r;
  for (std::uint32_t z = 0; z < (std::uint32_t{1} << m); ++z) {
    const double v = emb.value(z);
    if (v != 0.0) l += v * h(z);
  }
  for (std::uint32_t x = 0; x < (std::uint32_t{1} << n); ++x) r += evaluate_bits(f, x) * h(code.encode(x));
  return {std::ldexp(l.value(), -m), std::ldexp(r.value(), -m)};
}

// Brute-force agnostic learner for signed parities of at most `order`
// variables among the first `message_bits` coordinates: returns the one with
// the largest empirical correlation on `samples` examples.
struct ParityHypothesis {
  Subset set = 0;
  double sign = 1;
  double empirical_correlation = 0;
  double operator()(std::uint32_t z) const { return sign * parity_sign(set, z); }
};

inline ParityHypothesis agnostic_parity_stub(OracleSession& session, int message_bits, int order,
                                             std::size_t samples) {
  std::vector<std::uint32_t> xs(samples);
  std::vector<double> ys(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const auto ex = session.draw_example();
    xs[j] = ex.bits;
    ys[j] = ex.label;
  }
  ParityHypothesis best;
  best.empirical_correlation = -2;
  for_each_subset(full_set(message_bits), [&](Subset s) {
    if (set_size(s) > order) return;
    CompensatedSum acc;
    for (std::size_t j = 0; j < samples; ++j) acc += parity_sign(s, xs[j]) * ys[j];
    const double c = acc.value() / static_cast<double>(samples);
    if (std::abs(c) > best.empirical_correlation) {
      best.set = s;
      best.sign = c >= 0 ? 1.0 : -1.0;
      best.empirical_correlation = std::abs(c);
    }
  });
  return best;
}

}  // namespace localmq
