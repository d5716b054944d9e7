#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "dualot/core.hpp"

namespace dualot {

inline constexpr std::size_t kDefaultDenseCap = 4096;

/// Ground cost C with entries evaluated on demand.
///
/// Every value handed out is normalized by the raw sup-norm, so solvers see
/// costs in [0, 1]. `raw_sup()` keeps the original scale for reporting. A
/// kernel whose raw costs are all zero reports `sup() == 0` and evaluates to
/// zero everywhere.
///
/// Grid kernels index pixels row-major: point k sits at (k / width, k % width).
class CostKernel {
 public:
  struct Explicit {
    std::size_t n = 0;
    std::vector<double> normalized;  // row-major n x n
    bool symmetric = false;
  };
  struct Grid {
    std::size_t width = 0;
    std::size_t height = 0;
    int p = 1;
  };
  struct Color {
    std::vector<std::array<double, 3>> features;
    int p = 1;
  };

  /// Takes a row-major n x n matrix of nonnegative costs. Throws when n
  /// exceeds `dense_cap` or when an entry is negative.
  static CostKernel explicit_matrix(std::vector<double> costs, std::size_t n,
                                    std::size_t dense_cap = kDefaultDenseCap);
  static CostKernel grid(std::size_t width, std::size_t height, int p);
  static CostKernel color(std::vector<std::array<double, 3>> features, int p);

  std::size_t size() const { return n_; }
  double raw_sup() const { return raw_sup_; }
  /// Sup-norm of the normalized costs: 1, or 0 for an all-zero cost.
  double sup() const { return raw_sup_ > 0.0 ? 1.0 : 0.0; }
  bool symmetric() const;

  double operator()(std::size_t i, std::size_t j) const;

  /// Fills out[j] = C(i, j) for all j.
  void row(std::size_t i, std::span<double> out) const;
  /// Fills out[i] = C(i, j) for all i.
  void column(std::size_t j, std::span<double> out) const;

  /// Materialized normalized matrix. Intended for small n only.
  DenseCoupling dense() const;

  const std::variant<Explicit, Grid, Color>& variant() const { return impl_; }

 private:
  CostKernel(std::variant<Explicit, Grid, Color> impl, std::size_t n, double raw_sup);

  std::variant<Explicit, Grid, Color> impl_;
  std::size_t n_ = 0;
  double raw_sup_ = 0.0;
  double inv_sup_ = 0.0;
};

}  // namespace dualot
