#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "localmq/errors.hpp"
#include "localmq/numerics.hpp"

namespace localmq {

// Euclidean projection onto {w : sum |w_i| <= radius} (sort-based, exact).
inline std::vector<double> project_l1_ball(const std::vector<double>& v, double radius) {
  if (!(radius >= 0)) throw ContractViolation("L1 radius must be nonnegative");
  double l1 = 0;
  for (double x : v) l1 += std::abs(x);
  if (l1 <= radius) return v;
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0, tau = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0) tau = t;
  }
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v[i]) - tau, 0.0);
    w[i] = v[i] < 0 ? -m : m;
  }
  return w;
}

struct RegressionResult {
  std::vector<double> coeffs;
  double loss = 0;        // mean squared residual on the training sample
  std::size_t iterations = 0;
  bool converged = false;
};

struct RegressionOptions {
  double rel_tol = 1e-8;
  std::size_t patience = 10;
  std::size_t max_iter = 100000;
};

// Minimises (1/N) sum_j (y_j - <w, x_j>)^2 over the L1 ball of the given
// radius. Rows of `features` are samples. Accelerated projected gradient on
// the Gram form with adaptive restart, starting at w = 0.
inline RegressionResult constrained_regression(const std::vector<std::vector<double>>& features,
                                               const std::vector<double>& labels,
                                               double l1_bound,
                                               RegressionOptions opt = {}) {
  if (features.size() != labels.size())
    throw ContractViolation("constrained_regression: one label per sample row");
  const std::size_t N = features.size();
  const std::size_t k = N ? features.front().size() : 0;
  for (const auto& row : features)
    if (row.size() != k) throw ContractViolation("constrained_regression: ragged feature rows");
  RegressionResult res;
  res.coeffs.assign(k, 0.0);
  if (N == 0 || k == 0) {
    CompensatedSum s;
    for (double y : labels) s += y * y;
    res.loss = N ? s.value() / static_cast<double>(N) : 0.0;
    res.converged = true;
    return res;
  }

  // G = X^T X / N, b = X^T y / N, c = y^T y / N.
  std::vector<double> G(k * k, 0.0), b(k, 0.0);
  double c = 0;
  for (std::size_t j = 0; j < N; ++j) {
    const auto& x = features[j];
    const double y = labels[j];
    c += y * y;
    for (std::size_t a = 0; a < k; ++a) {
      if (x[a] == 0.0) continue;
      b[a] += x[a] * y;
      for (std::size_t q = a; q < k; ++q) G[a * k + q] += x[a] * x[q];
    }
  }
  const double invN = 1.0 / static_cast<double>(N);
  c *= invN;
  for (std::size_t a = 0; a < k; ++a) {
    b[a] *= invN;
    for (std::size_t q = a; q < k; ++q) {
      G[a * k + q] *= invN;
      G[q * k + a] = G[a * k + q];
    }
  }

  auto matvec = [&](const std::vector<double>& w, std::vector<double>& out) {
    for (std::size_t a = 0; a < k; ++a) {
      double s = 0;
      const double* row = &G[a * k];
      for (std::size_t q = 0; q < k; ++q) s += row[q] * w[q];
      out[a] = s;
    }
  };
  // loss(w) = w^T G w - 2 b^T w + c
  std::vector<double> tmp(k);
  auto loss = [&](const std::vector<double>& w) {
    matvec(w, tmp);
    double v = c;
    for (std::size_t a = 0; a < k; ++a) v += w[a] * tmp[a] - 2.0 * b[a] * w[a];
    return std::max(v, 0.0);
  };

  // Largest eigenvalue of G by power iteration (plus a safety margin).
  std::vector<double> v(k, 1.0 / std::sqrt(static_cast<double>(k))), gv(k);
  double lam = 0;
  for (int it = 0; it < 200; ++it) {
    matvec(v, gv);
    double nrm = 0;
    for (double z : gv) nrm += z * z;
    nrm = std::sqrt(nrm);
    if (nrm == 0) break;
    const double prev = lam;
    lam = nrm;
    for (std::size_t a = 0; a < k; ++a) v[a] = gv[a] / nrm;
    if (std::abs(lam - prev) <= 1e-10 * lam) break;
  }
  double trace = 0;
  for (std::size_t a = 0; a < k; ++a) trace += G[a * k + a];
  const double L = 2.0 * std::max(lam * 1.01, 1e-12 * std::max(trace, 1.0));
  const double step = 1.0 / L;

  std::vector<double> w(k, 0.0), yk(k, 0.0), grad(k), next(k);
  double t = 1.0;
  double f_prev = loss(w);
  std::size_t calm = 0;
  std::size_t it = 0;
  bool restarted = false;
  for (; it < opt.max_iter; ++it) {
    matvec(yk, grad);
    for (std::size_t a = 0; a < k; ++a) next[a] = yk[a] - step * 2.0 * (grad[a] - b[a]);
    next = project_l1_ball(next, l1_bound);
    const double f_next = loss(next);
    if (f_next > f_prev) {
      if (restarted) {
        // A plain projected step from w no longer descends: stationary.
        res.converged = true;
        ++it;
        break;
      }
      // Adaptive restart: drop momentum and retry from w.
      t = 1.0;
      yk = w;
      restarted = true;
      continue;
    }
    restarted = false;
    const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    for (std::size_t a = 0; a < k; ++a)
      yk[a] = next[a] + ((t - 1.0) / t_next) * (next[a] - w[a]);
    t = t_next;
    w.swap(next);
    const double improvement = f_prev - f_next;
    const double scale = std::max(std::abs(f_prev), 1e-300);
    if (improvement <= opt.rel_tol * scale) {
      if (++calm >= opt.patience) {
        f_prev = f_next;
        res.converged = true;
        ++it;
        break;
      }
    } else {
      calm = 0;
    }
    f_prev = f_next;
    if (f_prev == 0.0) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.coeffs = w;
  res.loss = f_prev;
  res.iterations = it;
  return res;
}

}  // namespace localmq
