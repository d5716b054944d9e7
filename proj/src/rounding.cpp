#include "dualot/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dualot {

namespace {
constexpr double kCorrectionGuard = 1e-15;
}

DenseCoupling round_to_polytope(const DenseCoupling& pi, const Histogram& r, const Histogram& c) {
  const std::size_t n = pi.rows();
  const std::size_t m = pi.cols();
  if (r.size() != n || c.size() != m) throw std::invalid_argument("round_to_polytope: shape mismatch");
  for (double v : pi.data()) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("round_to_polytope: negative entry");
  }

  DenseCoupling out = pi;
  std::vector<double> rows = out.row_marginal();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rows[i] > r[i] ? r[i] / rows[i] : 1.0;
    if (x != 1.0) {
      for (double& v : out.row(i)) v *= x;
    }
  }
  std::vector<double> cols = out.col_marginal();
  for (std::size_t j = 0; j < m; ++j) {
    const double y = cols[j] > c[j] ? c[j] / cols[j] : 1.0;
    if (y != 1.0) {
      for (std::size_t i = 0; i < n; ++i) out(i, j) *= y;
    }
  }

  rows = out.row_marginal();
  cols = out.col_marginal();
  std::vector<double> dr(n), dc(m);
  double dr_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dr[i] = std::max(r[i] - rows[i], 0.0);
    dr_norm += dr[i];
  }
  for (std::size_t j = 0; j < m; ++j) dc[j] = std::max(c[j] - cols[j], 0.0);
  if (dr_norm <= kCorrectionGuard) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (dr[i] == 0.0) continue;
    const double scale = dr[i] / dr_norm;
    auto row = out.row(i);
    for (std::size_t j = 0; j < m; ++j) row[j] += scale * dc[j];
  }
  return out;
}

InfeasibilityReport infeasibility(const DenseCoupling& pi, const Histogram& r, const Histogram& c) {
  if (pi.rows() != r.size() || pi.cols() != c.size()) throw std::invalid_argument("infeasibility: shape mismatch");
  return {l1_distance(pi.row_marginal(), r.weights()), l1_distance(pi.col_marginal(), c.weights())};
}

InfeasibilityReport infeasibility(std::span<const double> col_marginal, bool rows_exact, const Histogram& c) {
  return {rows_exact ? 0.0 : std::numeric_limits<double>::quiet_NaN(), l1_distance(col_marginal, c.weights())};
}

}  // namespace dualot
