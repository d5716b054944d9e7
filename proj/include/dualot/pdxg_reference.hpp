#pragma once

#include <cstddef>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/dxg.hpp"

namespace dualot {

/// Dense primal-dual extragradient iterate: explicit row-stochastic p, kept
/// as log p so that tiny entries do not underflow.
struct PdxgState {
  DenseCoupling log_p;
  LogOddsField mu;
  std::size_t t = 0;

  /// D_r p.
  DenseCoupling plan(const Histogram& r) const;
};

/// Uniform rows and uniform dual. Throws when n exceeds `dense_cap`.
PdxgState pdxg_initial_state(std::size_t n, std::size_t dense_cap = kDefaultDenseCap);

/// One extragradient step on explicit rows. Both primal updates use p^t as
/// the prox center:
///   log p_i <- (1 - tau_p eta) log p_i - tau_p (C_i + 2 ||C|| (mu_+ - mu_-)), renormalized,
/// with mu^t for the midpoint and the midpoint dual for the main step.
PdxgState pdxg_reference_step(const PdxgState& state, const CostKernel& kernel, const Histogram& r,
                              const Histogram& c, const DxgParams& params,
                              std::size_t dense_cap = kDefaultDenseCap);

}  // namespace dualot
