#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "localmq/errors.hpp"

namespace localmq {

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Binomial pmf vector [Pr[Bin(n, p) = j]]_{j=0..n}, computed in log space.
inline std::vector<double> binomial_pmf(int n, double p) {
  if (n < 0) throw ContractViolation("binomial_pmf: negative trial count");
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  if (p >= 1.0) {
    out[static_cast<std::size_t>(n)] = 1.0;
    return out;
  }
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  for (int j = 0; j <= n; ++j)
    out[static_cast<std::size_t>(j)] =
        std::exp(lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * lp + (n - j) * lq);
  return out;
}

inline double log2_binomial(int n, int k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) /
         std::log(2.0);
}

// Exact binomial coefficient as double (fine for the small arguments used here).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace localmq
