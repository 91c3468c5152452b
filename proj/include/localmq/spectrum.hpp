#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "localmq/bits.hpp"

namespace localmq {

enum class BasisKind { uniform_pm, product_mu, monomial_01 };

inline std::string to_string(BasisKind b) {
  switch (b) {
    case BasisKind::uniform_pm: return "uniform_pm";
    case BasisKind::product_mu: return "product_mu";
    case BasisKind::monomial_01: return "monomial_01";
  }
  return "?";
}

inline BasisKind basis_from_string(const std::string& s) {
  if (s == "uniform_pm") return BasisKind::uniform_pm;
  if (s == "product_mu") return BasisKind::product_mu;
  if (s == "monomial_01") return BasisKind::monomial_01;
  throw ContractViolation("unknown basis '" + s + "'");
}

// A basis of real functions on the n-cube. For product_mu, `means` holds
// mu_i = E[x_i] on {-1,+1}^n and the basis functions are
// chi^mu_S(x) = prod_{i in S} (x_i - mu_i) / sqrt(1 - mu_i^2).
struct Basis {
  BasisKind kind = BasisKind::uniform_pm;
  std::vector<double> means;

  static Basis uniform() { return {BasisKind::uniform_pm, {}}; }
  static Basis monomial() { return {BasisKind::monomial_01, {}}; }
  static Basis product(std::vector<double> mu) {
    for (double m : mu)
      if (!(m > -1.0 && m < 1.0))
        throw ContractViolation("product basis means must lie in (-1, 1)");
    return {BasisKind::product_mu, std::move(mu)};
  }

  Domain domain() const {
    return kind == BasisKind::monomial_01 ? Domain::zero_one
                                          : Domain::plus_minus;
  }

  // Value of the one-variable factor for coordinate i at a high/low bit.
  double factor(int i, bool high) const {
    switch (kind) {
      case BasisKind::uniform_pm: return high ? 1.0 : -1.0;
      case BasisKind::monomial_01: return high ? 1.0 : 0.0;
      case BasisKind::product_mu: {
        const double mu = means[static_cast<std::size_t>(i)];
        const double x = high ? 1.0 : -1.0;
        return (x - mu) / std::sqrt(1.0 - mu * mu);
      }
    }
    return 0.0;
  }

  double eval(Subset s, std::uint32_t bits) const {
    switch (kind) {
      case BasisKind::uniform_pm: return parity_sign(s, bits);
      case BasisKind::monomial_01: return is_subset(s, bits) ? 1.0 : 0.0;
      case BasisKind::product_mu: {
        double v = 1.0;
        for (Subset r = s; r; r &= r - 1)
          v *= factor(std::countr_zero(r), contains(bits, std::countr_zero(r)));
        return v;
      }
    }
    return 0.0;
  }

  friend bool operator==(const Basis&, const Basis&) = default;
};

// Sparse coefficient map in a declared basis. Keys iterate in ascending
// bitmask order.
struct FourierSpectrum {
  int n = 0;
  Basis basis;
  std::map<Subset, double> coeffs;

  double coefficient(Subset s) const {
    auto it = coeffs.find(s);
    return it == coeffs.end() ? 0.0 : it->second;
  }

  double l1() const {
    double v = 0;
    for (const auto& [s, c] : coeffs) v += std::abs(c);
    return v;
  }
  double l2() const {
    double v = 0;
    for (const auto& [s, c] : coeffs) v += c * c;
    return v;
  }
  double linf() const {
    double v = 0;
    for (const auto& [s, c] : coeffs) v = std::max(v, std::abs(c));
    return v;
  }
  std::size_t l0() const {
    return static_cast<std::size_t>(std::count_if(
        coeffs.begin(), coeffs.end(), [](const auto& kv) { return kv.second != 0.0; }));
  }
  int degree() const {
    int d = 0;
    for (const auto& [s, c] : coeffs)
      if (c != 0.0) d = std::max(d, set_size(s));
    return d;
  }

  double evaluate(std::uint32_t bits) const {
    double v = 0;
    for (const auto& [s, c] : coeffs) v += c * basis.eval(s, bits);
    return v;
  }

  // Drops coefficients with |c| <= tol.
  void prune(double tol) {
    std::erase_if(coeffs, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
  }
};

inline nlohmann::json to_json(const FourierSpectrum& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [s, c] : f.coeffs)
    coeffs.push_back({{"set", to_one_based(s)}, {"c", c}});
  nlohmann::json j{{"basis", to_string(f.basis.kind)}, {"n", f.n}, {"coeffs", coeffs}};
  if (f.basis.kind == BasisKind::product_mu) j["means"] = f.basis.means;
  return j;
}

inline FourierSpectrum spectrum_from_json(const nlohmann::json& j) {
  FourierSpectrum f;
  f.n = j.at("n").get<int>();
  check_dimension(f.n);
  f.basis.kind = basis_from_string(j.at("basis").get<std::string>());
  if (f.basis.kind == BasisKind::product_mu)
    f.basis = Basis::product(j.at("means").get<std::vector<double>>());
  for (const auto& e : j.at("coeffs"))
    f.coeffs[from_one_based(e.at("set").get<std::vector<int>>(), f.n)] +=
        e.at("c").get<double>();
  return f;
}

}  // namespace localmq
