#pragma once

// Test-side helpers: random instances and small numerical oracles that do
// not share code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline std::vector<double> random_positive(std::size_t n, Rng& rng, double lo = 0.05, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline dualot::Histogram random_histogram(std::size_t n, Rng& rng, double lo = 0.05) {
  return dualot::Histogram::normalized(random_positive(n, rng, lo, 1.0));
}

inline std::vector<double> random_costs(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * n);
  for (double& x : c) x = u(rng);
  return c;
}

inline dualot::CostKernel random_kernel(std::size_t n, Rng& rng) {
  return dualot::CostKernel::explicit_matrix(random_costs(n, rng), n);
}

inline double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Minimizer of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters && hi - lo > 1e-16; ++k) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

/// Root of an increasing function on [lo, hi] by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Euclidean projection onto the probability simplex (sort-based).
inline std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

/// Projected gradient descent on the simplex for a smooth convex objective,
/// starting at uniform. Step sizes are fixed; callers pick a safe one.
inline std::vector<double> minimize_on_simplex(const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                                               std::size_t n, double step, int iters) {
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  for (int k = 0; k < iters; ++k) {
    const auto g = grad(x);
    for (std::size_t i = 0; i < n; ++i) x[i] -= step * g[i];
    x = project_simplex(std::move(x));
  }
  return x;
}

/// Dense row-major cost matrix of a kernel.
inline std::vector<double> dense_costs(const dualot::CostKernel& k) {
  const std::size_t n = k.size();
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = k(i, j);
  }
  return c;
}

/// D_r p for p_ij ∝ exp(-(a C_ij + b_j)), computed naively.
inline std::vector<double> naive_plan(const std::vector<double>& C, std::size_t n, double a,
                                      const std::vector<double>& b, const std::vector<double>& r) {
  std::vector<double> P(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double hi = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) hi = std::max(hi, -(a * C[i * n + j] + b[j]));
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += std::exp(-(a * C[i * n + j] + b[j]) - hi);
    for (std::size_t j = 0; j < n; ++j) P[i * n + j] = r[i] * std::exp(-(a * C[i * n + j] + b[j]) - hi) / z;
  }
  return P;
}

inline std::vector<double> col_sums(const std::vector<double>& P, std::size_t n) {
  std::vector<double> c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[j] += P[i * n + j];
  }
  return c;
}

}  // namespace testing
