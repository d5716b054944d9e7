#pragma once

#include <cstddef>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"

namespace dualot {

inline constexpr std::size_t kOracleMaxSize = 64;

struct ExactSolution {
  double value = 0.0;  // <C, plan>, in the units of the cost given
  DenseCoupling plan;
  std::vector<double> u;  // u_i + v_j <= C_ij, equality on the basis
  std::vector<double> v;
  std::size_t pivots = 0;
};

/// Transport LP solved by the primal simplex on the transportation tableau:
/// northwest-corner start, potentials from the basis tree, lowest-index
/// entering cell and lowest-index leaving cell. Throws when either side
/// exceeds kOracleMaxSize or the marginal masses differ by more than 1e-9.
ExactSolution exact_ot(const DenseCoupling& cost, const Histogram& r, const Histogram& c);
/// Same, on the kernel's normalized costs.
ExactSolution exact_ot(const CostKernel& kernel, const Histogram& r, const Histogram& c);

/// Entropic plan for n <= 16 by Sinkhorn at tolerance 1e-13. Throws
/// std::runtime_error when the first-order residuals exceed 1e-9.
DenseCoupling exact_eot_small(const CostKernel& kernel, const Histogram& r, const Histogram& c, double eta);

}  // namespace dualot
