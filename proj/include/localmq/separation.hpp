#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"
#include "localmq/errors.hpp"
#include "localmq/oracles.hpp"
#include "localmq/random.hpp"
#include "localmq/targets.hpp"

namespace localmq {

// Labels are +-1 with bit 0 -> +1 and bit 1 -> -1, so XOR of bits is the
// product of labels.
inline double bit_to_label(int b) { return b ? -1.0 : 1.0; }

enum class PrfVariant { g, g_prime };

inline std::string to_string(PrfVariant v) { return v == PrfVariant::g ? "G" : "Gprime"; }

// The PRF-based separation targets over {0,1}. Variant g lives on n+1 bits:
// x_1 is bit 0 and the suffix x_{-1} is bits 1..n. Variant g_prime lives on n
// bits and answers s_i at the unit vector e^i.
class PrfTarget {
 public:
  PrfTarget(int n, std::uint32_t secret, PrfVariant variant, std::uint64_t key_seed)
      : n_(n), secret_(secret & full_set(n)), variant_(variant), key_seed_(key_seed),
        prf_(derive_seed(key_seed, secret & full_set(n)), 0x707266ULL) {
    if (n < 1) throw ContractViolation("separation target needs n >= 1");
    check_dimension(variant == PrfVariant::g ? n + 1 : n);
  }

  int n() const { return n_; }
  int dimension() const { return variant_ == PrfVariant::g ? n_ + 1 : n_; }
  std::uint32_t secret() const { return secret_; }
  PrfVariant variant() const { return variant_; }

  int secret_bit(int i) const { return contains(secret_, i) ? 1 : 0; }

  // f_s on n-bit strings, as a bit.
  int prf_bit(std::uint32_t x) const { return prf_.bit(x); }

  // 0-based block of an n-bit suffix: floor(rank * n / 2^n), where the rank
  // reads x_2 (bit 0 of the suffix) as the most significant digit.
  int block(std::uint32_t suffix) const {
    std::uint64_t rank = 0;
    for (int j = 0; j < n_; ++j) rank = (rank << 1) | ((suffix >> j) & 1u);
    return static_cast<int>((rank * static_cast<std::uint64_t>(n_)) >> n_);
  }

  int value_bit(std::uint32_t bits) const {
    if (variant_ == PrfVariant::g) {
      const std::uint32_t suffix = bits >> 1;
      const int base = prf_bit(suffix);
      return (bits & 1u) ? base ^ secret_bit(block(suffix)) : base;
    }
    if (std::popcount(bits) == 1) return secret_bit(std::countr_zero(bits));
    return prf_bit(bits);
  }

  double operator()(std::uint32_t bits) const { return bit_to_label(value_bit(bits)); }

  TargetFunction as_target() const {
    CallableTarget c;
    c.n = dimension();
    c.domain = Domain::zero_one;
    c.boolean = true;
    const PrfTarget copy = *this;
    c.fn = [copy](std::uint32_t x) { return copy(x); };
    c.name = "prf-" + to_string(variant_);
    return c;
  }

 private:
  int n_;
  std::uint32_t secret_;
  PrfVariant variant_;
  std::uint64_t key_seed_;
  KeyedPrf prf_;
};

struct SecretRecovery {
  std::uint32_t secret = 0;
  std::size_t examples = 0;
  std::size_t queries = 0;
};

// One example plus the query flipping x_1 reveals the secret bit of the
// suffix's block; stop once every block has been seen.
inline SecretRecovery learn_g_onelocal(OracleSession& session, int n, std::size_t budget) {
  if (session.dimension() != n + 1) throw ContractViolation("learn_g_onelocal: session must have n+1 bits");
  if (session.locality() < 1) throw ContractViolation("learn_g_onelocal needs 1-local queries");
  const PrfTarget layout(n, 0, PrfVariant::g, 0);
  SecretRecovery out;
  Subset seen = 0;
  while (seen != full_set(n)) {
    if (out.examples >= budget)
      throw RetryableError("learn_g_onelocal: " + std::to_string(n - set_size(seen)) +
                           " blocks uncovered after " + std::to_string(budget) + " examples");
    const auto ex = session.draw_example();
    ++out.examples;
    const double other = session.local_query(ex.bits ^ 1u, ex.index);
    ++out.queries;
    const int i = layout.block(ex.bits >> 1);
    seen |= Subset{1} << i;
    if (ex.label * other < 0) out.secret |= std::uint32_t{1} << i;
  }
  return out;
}

// Default example budget: ceil(n ln(n / delta)) + n.
inline std::size_t onelocal_budget(int n, double delta) {
  return static_cast<std::size_t>(std::ceil(n * std::log(n / delta))) + static_cast<std::size_t>(n);
}

// Best of {constant, single literal} by training error.
struct SimpleHypothesis {
  int var = -1;  // -1: constant
  double sign = 1;
  double train_error = 0;
  double operator()(std::uint32_t x) const {
    if (var < 0) return sign;
    return sign * (contains(x, var) ? -1.0 : 1.0);
  }
  nlohmann::json to_json() const {
    return {{"var", var < 0 ? nlohmann::json(nullptr) : nlohmann::json(var + 1)},
            {"sign", sign},
            {"train_error", train_error}};
  }
};

inline SimpleHypothesis fit_simple(int n, const std::vector<std::uint32_t>& xs, const std::vector<double>& ys) {
  SimpleHypothesis best;
  best.train_error = 2;
  const double N = static_cast<double>(xs.size());
  for (int v = -1; v < n; ++v) {
    double agree = 0;
    SimpleHypothesis h;
    h.var = v;
    for (std::size_t j = 0; j < xs.size(); ++j) agree += h(xs[j]) * ys[j];
    h.sign = agree >= 0 ? 1.0 : -1.0;
    h.train_error = (N - std::abs(agree)) / (2.0 * N);
    if (h.train_error < best.train_error) best = h;
  }
  return best;
}

struct BaselineResult {
  SimpleHypothesis hypothesis;
  std::size_t train_points = 0;
  std::size_t heldout = 0;
  double heldout_error = 0;

  nlohmann::json to_json() const {
    return {{"hypothesis", hypothesis.to_json()},
            {"train_points", train_points},
            {"heldout", heldout},
            {"heldout_error", heldout_error}};
  }
};

namespace detail {
inline double heldout_error(OracleSession& session, const SimpleHypothesis& h, std::size_t m) {
  std::size_t wrong = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto ex = session.draw_example();
    if (h(ex.bits) != ex.label) ++wrong;
  }
  return m ? static_cast<double>(wrong) / static_cast<double>(m) : 0.0;
}
}  // namespace detail

// Examples only.
inline BaselineResult pac_baseline(OracleSession& session, std::size_t train, std::size_t heldout) {
  std::vector<std::uint32_t> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < train; ++j) {
    const auto ex = session.draw_example();
    xs.push_back(ex.bits);
    ys.push_back(ex.label);
  }
  BaselineResult r;
  r.hypothesis = fit_simple(session.dimension(), xs, ys);
  r.train_points = xs.size();
  r.heldout = heldout;
  r.heldout_error = detail::heldout_error(session, r.hypothesis, heldout);
  return r;
}

// Same hypothesis class, trained on each example plus every point within
// distance `radius` of it (radius <= session locality, at most 2).
inline BaselineResult local_baseline(OracleSession& session, int radius, std::size_t train,
                                     std::size_t heldout) {
  if (radius < 0 || radius > 2) throw ContractViolation("local_baseline: radius must lie in [0, 2]");
  if (radius > session.locality()) throw ContractViolation("local_baseline: radius exceeds the locality");
  const int n = session.dimension();
  std::vector<std::uint32_t> xs;
  std::vector<double> ys;
  for (std::size_t j = 0; j < train; ++j) {
    const auto ex = session.draw_example();
    xs.push_back(ex.bits);
    ys.push_back(ex.label);
    for (int a = 0; a < n && radius >= 1; ++a) {
      const std::uint32_t q1 = ex.bits ^ (std::uint32_t{1} << a);
      xs.push_back(q1);
      ys.push_back(session.local_query(q1, ex.index));
      for (int b = a + 1; b < n && radius >= 2; ++b) {
        const std::uint32_t q2 = q1 ^ (std::uint32_t{1} << b);
        xs.push_back(q2);
        ys.push_back(session.local_query(q2, ex.index));
      }
    }
  }
  BaselineResult r;
  r.hypothesis = fit_simple(n, xs, ys);
  r.train_points = xs.size();
  r.heldout = heldout;
  r.heldout_error = detail::heldout_error(session, r.hypothesis, heldout);
  return r;
}

// Queries e^1..e^n anchored at one fresh example. Succeeds only when the
// session's locality reaches every unit vector from that anchor.
inline std::uint32_t gprime_full_mq_break(OracleSession& session) {
  const int n = session.dimension();
  const auto ex = session.draw_example();
  std::uint32_t s = 0;
  for (int i = 0; i < n; ++i) {
    const double y = session.local_query(std::uint32_t{1} << i, ex.index);
    if (y < 0) s |= std::uint32_t{1} << i;
  }
  return s;
}

struct PrfQuality {
  std::size_t samples = 0;
  double monobit_z = 0;
  double serial_z = 0;
  bool pass = false;

  nlohmann::json to_json() const {
    return {{"samples", samples}, {"monobit_z", monobit_z}, {"serial_z", serial_z}, {"pass", pass}};
  }
};

// Monobit and lag-1 serial-correlation z-scores of f_s over consecutive
// inputs; passes when both are within 3.
inline PrfQuality prf_quality(const PrfTarget& g, std::size_t samples) {
  if (samples < 2) throw ContractViolation("prf_quality needs at least two samples");
  PrfQuality q;
  q.samples = samples;
  double ones = 0, corr = 0;
  double prev = 0;
  for (std::size_t j = 0; j < samples; ++j) {
    const double y = bit_to_label(g.prf_bit(static_cast<std::uint32_t>(j)));
    if (y < 0) ones += 1;
    if (j) corr += y * prev;
    prev = y;
  }
  const double N = static_cast<double>(samples);
  q.monobit_z = (ones - N / 2.0) / (std::sqrt(N) / 2.0);
  q.serial_z = corr / std::sqrt(N - 1.0);
  q.pass = std::abs(q.monobit_z) <= 3.0 && std::abs(q.serial_z) <= 3.0;
  return q;
}

}  // namespace localmq
