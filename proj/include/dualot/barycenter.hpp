#pragma once

#include <cstddef>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/dxg.hpp"
#include "dualot/trajectory.hpp"

namespace dualot {

/// m per-marginal duals sharing one cost weight `a` and one sequence `s`.
/// The barycenter itself is never stored; it is recomputed from (a, b_k).
struct BarycenterState {
  std::vector<LogOddsField> mu;
  std::vector<std::vector<double>> b;
  double a = 0.0;
  double s = 0.0;
  std::size_t t = 0;
  std::vector<double> w;  // sums to 1

  std::size_t marginals() const { return mu.size(); }
};

/// Uniform start. Weights must be positive; they are normalized here.
BarycenterState initial_barycenter_state(std::size_t n, std::vector<double> weights);

/// r_i ∝ exp(sum_k w_k LSE_j(-(a C_ij + b_kj))). Throws for eta <= 0.
Histogram barycenter_marginal(const BarycenterState& state, const CostKernel& kernel, double eta,
                              unsigned workers = 1);

/// One step: midpoint duals against the plans at (a, b_k) with row marginal
/// r(a, b), then balanced main duals against the midpoint plans with row
/// marginal r(a', b~), then main weights from the midpoint duals.
BarycenterState dxgb_step(const BarycenterState& state, const CostKernel& kernel,
                          const std::vector<Histogram>& marginals, const DxgParams& params, unsigned workers = 1);

/// sum_k w_k (<C, D_r p_k> + 2 ||C|| ||c(D_r p_k) - c_k||_1 - eta H(D_r p_k)).
double barycenter_objective(const BarycenterState& state, const CostKernel& kernel,
                            const std::vector<Histogram>& marginals, double eta, unsigned workers = 1);

/// -sum_k w_k <c_k, d_k> - eta LSE_i(sum_k w_k LSE_j(-(C_ij + d_kj) / eta)),
/// d_k = 2 ||C|| (mu_{k,+} - mu_{k,-}). A lower bound on the objective.
double barycenter_dual_value(const BarycenterState& state, const CostKernel& kernel,
                             const std::vector<Histogram>& marginals, double eta, unsigned workers = 1);

struct BarycenterSolution {
  Histogram barycenter;
  BarycenterState state;
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> col_infeas_l1;  // per marginal, at the returned state
  double gap = 0.0;
  std::vector<TrajectoryRow> trajectory;
};

/// Iterates dxgb_step until the largest column infeasibility and the gap
/// are both <= eps/6 (checked on the logging stride) or a limit is hit.
/// Returns the final state.
BarycenterSolution dxgb_solve(const CostKernel& kernel, const std::vector<Histogram>& marginals,
                              std::vector<double> weights, const DxgParams& params, const Termination& term = {});

}  // namespace dualot
