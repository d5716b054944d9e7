#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/trajectory.hpp"

namespace dualot {

/// Entropic dual potentials, in normalized cost units. The plan they define
/// is pi_ij = exp((phi_i + psi_j - C_ij) / eta) / Z.
struct DualPotentials {
  std::vector<double> phi;
  std::vector<double> psi;
  double eta = 0.0;
};

struct SinkhornResult {
  DualPotentials potentials;
  bool converged = false;
  std::size_t iterations = 0;
  double col_gap = 0.0;
  std::vector<TrajectoryRow> trajectory;
};

/// Log-domain Sinkhorn. Each sweep makes the row marginals exact, then
/// stops if ||c(pi) - c||_1 <= tol, else makes the columns exact. The
/// returned potentials are shifted so that phi has zero mean.
SinkhornResult sinkhorn_solve(const CostKernel& kernel, const Histogram& r, const Histogram& c, double eta,
                              double tol, std::size_t max_iter, const Termination& log = {});

/// <phi, r> + <psi, c> - eta LSE_ij((phi_i + psi_j - C_ij) / eta).
double eot_dual_value(const DualPotentials& pot, const CostKernel& kernel, const Histogram& r, const Histogram& c);

/// <C, pi> - eta H(pi) for an explicit plan.
double eot_primal_value(const DenseCoupling& pi, const CostKernel& kernel, double eta);

/// Normalized plan of the potentials. Dense, for small n.
DenseCoupling sinkhorn_plan(const DualPotentials& pot, const CostKernel& kernel);

/// Column marginal of the normalized plan, streamed by rows.
std::vector<double> sinkhorn_col_marginal(const DualPotentials& pot, const CostKernel& kernel);

/// Shifts phi to zero mean and psi to zero mean independently. The plan is
/// unchanged up to its normalization constant.
DualPotentials center_potentials(DualPotentials pot);

struct IbpResult {
  Histogram barycenter;
  std::vector<DualPotentials> potentials;  // one (f_k, g_k) pair per marginal
  bool converged = false;
  std::size_t iterations = 0;
  double col_gap = 0.0;  // max over k of ||c(pi_k) - c_k||_1
  std::vector<TrajectoryRow> trajectory;
};

/// Fixed-support entropic barycenter by iterative Bregman projections in the
/// log domain. Weights are normalized on entry.
IbpResult ibp_barycenter(const CostKernel& kernel, const std::vector<Histogram>& marginals,
                         std::vector<double> weights, double eta, double tol, std::size_t max_iter,
                         const Termination& log = {});

}  // namespace dualot
