#include "dualot/pdxg_reference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualot {
namespace {

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw std::invalid_argument("pdxg reference: n = " + std::to_string(n) + " exceeds the dense cap " +
                                std::to_string(cap));
  }
}

// Mirror step on every row, normalized in the log domain.
DenseCoupling primal_step(const DenseCoupling& log_p, const CostKernel& kernel, const LogOddsField& mu,
                          const DxgParams& params) {
  const std::size_t n = log_p.rows();
  const double sup = kernel.sup();
  const double decay = 1.0 - params.tau_p * params.eta;
  DenseCoupling out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = decay * log_p(i, j) - params.tau_p * (kernel(i, j) + 2.0 * sup * mu.difference(j));
    }
    const double z = lse(row);
    for (double& v : row) v -= z;
  }
  return out;
}

std::vector<double> dense_col_marginal(const DenseCoupling& log_p, const Histogram& r) {
  const std::size_t n = log_p.rows();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += r[i] * std::exp(log_p(i, j));
  }
  return out;
}

}  // namespace

DenseCoupling PdxgState::plan(const Histogram& r) const {
  DenseCoupling out(log_p.rows(), log_p.cols());
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = r[i] * std::exp(log_p(i, j));
  }
  return out;
}

PdxgState pdxg_initial_state(std::size_t n, std::size_t dense_cap) {
  check_cap(n, dense_cap);
  PdxgState s;
  s.log_p = DenseCoupling(n, n, -std::log(static_cast<double>(n)));
  s.mu.delta.assign(n, 0.0);
  return s;
}

PdxgState pdxg_reference_step(const PdxgState& state, const CostKernel& kernel, const Histogram& r,
                              const Histogram& c, const DxgParams& params, std::size_t dense_cap) {
  const std::size_t n = kernel.size();
  check_cap(n, dense_cap);
  const double sup = kernel.sup();
  const auto ct = perturbed_marginal(c, params.alpha);

  const DenseCoupling mid_p = primal_step(state.log_p, kernel, state.mu, params);
  const LogOddsField mid_mu = dual_md_step(state.mu, dense_col_marginal(state.log_p, r), c, ct, params, sup);

  PdxgState next;
  next.mu = balance(dual_md_step(state.mu, dense_col_marginal(mid_p, r), c, ct, params, sup), params.beta);
  next.log_p = primal_step(state.log_p, kernel, mid_mu, params);
  next.t = state.t + 1;
  return next;
}

}  // namespace dualot
