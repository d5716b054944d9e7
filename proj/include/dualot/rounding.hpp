#pragma once

#include <span>

#include "dualot/core.hpp"

namespace dualot {

struct InfeasibilityReport {
  double row_gap = 0.0;  // ||r(pi) - r||_1
  double col_gap = 0.0;  // ||c(pi) - c||_1
};

/// Maps a nonnegative matrix onto the transport polytope of (r, c).
///
/// Rows are scaled down to at most r, then columns down to at most c, and
/// the leftover mass is spread as a rank-one correction. The result differs
/// from `pi` by at most 2 (row_gap + col_gap) in l1. Dense: O(n^2).
DenseCoupling round_to_polytope(const DenseCoupling& pi, const Histogram& r, const Histogram& c);

/// Marginal residuals of an explicit matrix.
InfeasibilityReport infeasibility(const DenseCoupling& pi, const Histogram& r, const Histogram& c);

/// Residuals when only the column marginal is known. With `rows_exact` the
/// row gap is taken to be zero, as for plans whose rows are normalized by
/// construction; otherwise it is reported as NaN.
InfeasibilityReport infeasibility(std::span<const double> col_marginal, bool rows_exact, const Histogram& c);

}  // namespace dualot
