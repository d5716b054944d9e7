#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dualot/core.hpp"
#include "dualot/cost_kernel.hpp"
#include "dualot/sinkhorn.hpp"
#include "dualot/trajectory.hpp"

namespace dualot {

/// Dual extragradient parameters. All values refer to the normalized cost.
struct DxgParams {
  double eta = 0.0;     // primal entropic weight
  double eta_mu = 0.0;  // dual entropic weight
  double tau_p = 1.0;
  double tau_mu = 1.0;
  double beta = 1.1;    // log-odds cap
  double alpha = 0.01;  // column perturbation, c~ = c + alpha / n

  /// Throws std::invalid_argument unless stepsizes are positive and the
  /// contraction factors 1 - tau * eta stay in (0, 1].
  void validate() const;
};

/// Aggressive fixed choice: tau_p = tau_mu = 1, beta = 1.1, alpha = 0.01, eta_mu = 0.
DxgParams params_tuned(double eta);

/// Prior-work scheme. beta = C1 log(n / eps), eta = eta_mu = eps C2^2 / (sqrt(beta) log n),
/// tau_mu = 15 C2 sqrt(beta), tau_p = C2 / sqrt(beta), alpha = C3.
DxgParams params_li(std::size_t n, double eps, double C1 = 100.0, double C2 = 1.0, double C3 = 1.0);

/// Loose scheme with alpha = 1 and beta = log 3. `min_c` is the smallest
/// entry of c; the perturbed minimum min c~ = min_c + 1/n sets tau_p.
DxgParams params_loose(std::size_t n, double eps, double min_c, double cost_sup = 1.0);

/// Per-column dual point on the 2-simplex, stored as log-odds
/// delta_j = log mu_{+,j} - log mu_{-,j}.
struct LogOddsField {
  std::vector<double> delta;

  std::size_t size() const { return delta.size(); }
  double mu_plus(std::size_t j) const { return logistic(delta[j]); }
  double mu_minus(std::size_t j) const { return logistic(-delta[j]); }
  /// mu_+ - mu_- = tanh(delta / 2).
  double difference(std::size_t j) const;
};

/// O(n) description of the row-stochastic plan p_ij ∝ exp(-(a C_ij + b_j)).
struct TransportLogWeights {
  double a = 0.0;
  std::vector<double> b;
  double s = 0.0;
  std::size_t t = 0;
};

struct DxgState {
  LogOddsField mu;
  TransportLogWeights weights;
};

/// Uniform dual, a = b = 0, s = 0.
DxgState initial_state(std::size_t n);

/// c + alpha / n, per entry.
std::vector<double> perturbed_marginal(const Histogram& c, double alpha);

/// Closed form 1 - (1 - tau_p eta)^t.
double s_closed_form(double tau_p, double eta, std::size_t t);

/// Row i of the implicit plan: softmax over j of -(a C_ij + b_j).
void implicit_row(const TransportLogWeights& w, const CostKernel& kernel, std::size_t i, std::span<double> out);

/// sum_i r_i p_i, one O(n^2) pass in O(n) memory per worker. Per-worker
/// partial sums are added in worker order, so the result is bitwise
/// reproducible for a fixed worker count.
std::vector<double> column_marginal(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r,
                                    unsigned workers = 1);

/// Explicit D_r p. Dense, for small n.
DenseCoupling materialize_plan(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r);

/// delta' = (1 - tau_mu eta_mu) delta + 4 tau_mu ||C|| (cm - c) / c~.
LogOddsField dual_md_step(const LogOddsField& mu, std::span<const double> col_marginal, const Histogram& c,
                          std::span<const double> c_tilde, const DxgParams& params, double cost_sup = 1.0);

/// Clamps every log-odds to [-beta, beta], the KL projection onto the
/// columns whose mass ratio is at most e^beta.
LogOddsField balance(LogOddsField mu, double beta);

/// One extragradient iteration: midpoint dual and weights, then the main
/// dual (balanced) and weights. Two column-marginal passes.
DxgState dxg_step(const DxgState& state, const CostKernel& kernel, const Histogram& r, const Histogram& c,
                  std::span<const double> c_tilde, const DxgParams& params, unsigned workers = 1);
DxgState dxg_step(const DxgState& state, const CostKernel& kernel, const Histogram& r, const Histogram& c,
                  const DxgParams& params, unsigned workers = 1);

/// <C, D_r p> + 2 ||C|| ||c(D_r p) - c||_1 - eta H(D_r p), streamed.
double primal_penalized_value(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r,
                              const Histogram& c, double eta, unsigned workers = 1);

/// Concave dual of the penalized primal at mu, with d = 2 ||C|| (mu_+ - mu_-):
///   -<c, d> - eta sum_i r_i LSE_j(-(C_ij + d_j) / eta) - eta H(r)
/// and, for eta = 0, its limit -<c, d> + sum_i r_i min_j (C_ij + d_j).
double dual_penalized_value(const LogOddsField& mu, const CostKernel& kernel, const Histogram& r,
                            const Histogram& c, double eta, unsigned workers = 1);

/// EOT potentials read off the dual: psi = -2 ||C|| (mu_+ - mu_-) and
/// phi_i = eta (log r_i - log Z_i), each shifted to zero mean.
DualPotentials recover_eot_potentials(const LogOddsField& mu, const CostKernel& kernel, const Histogram& r,
                                      double eta);

struct DxgSolution {
  DxgState state;  // best logged state
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t best_iter = 0;
  double primal = 0.0;  // original cost units
  double dual = 0.0;
  double gap = 0.0;
  double col_infeas_l1 = 0.0;
  unsigned workers = 1;
  std::vector<TrajectoryRow> trajectory;
  std::optional<DenseCoupling> rounded_plan;  // n <= dense cap only
  double rounded_cost = 0.0;                  // original cost units
};

/// Runs dxg_step until gap <= eps/6 and column infeasibility <= eps/6, both
/// checked on the logging stride, or until an iteration or time limit. The
/// state returned is the logged one with the smallest gap + infeasibility.
DxgSolution dxg_solve(const CostKernel& kernel, const Histogram& r, const Histogram& c, const DxgParams& params,
                      const Termination& term = {}, std::size_t dense_cap = kDefaultDenseCap);

}  // namespace dualot
