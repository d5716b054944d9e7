#include "dualot/dxg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "detail/parallel.hpp"
#include "detail/plan_pass.hpp"
#include "dualot/rounding.hpp"

namespace dualot {

void DxgParams::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument("DxgParams: " + what); };
  if (!(eta >= 0.0) || !(eta_mu >= 0.0)) bad("eta and eta_mu must be >= 0");
  if (!(tau_p > 0.0) || !(tau_mu > 0.0)) bad("stepsizes must be positive");
  if (!(tau_p * eta < 1.0) || !(tau_mu * eta_mu < 1.0)) bad("tau * eta must be below 1");
  if (!(beta > 0.0)) bad("beta must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must lie in [0, 1]");
}

DxgParams params_tuned(double eta) {
  if (!(eta >= 0.0)) throw std::invalid_argument("params_tuned: eta must be >= 0");
  return DxgParams{eta, 0.0, 1.0, 1.0, 1.1, 0.01};
}

DxgParams params_li(std::size_t n, double eps, double C1, double C2, double C3) {
  if (n < 2 || !(eps > 0.0)) throw std::invalid_argument("params_li: need n >= 2 and eps > 0");
  if (!(C1 > 0.0) || !(C2 > 0.0) || !(C3 >= 0.0)) throw std::invalid_argument("params_li: bad constants");
  const double ratio = static_cast<double>(n) / eps;
  if (!(ratio > 1.0)) throw std::invalid_argument("params_li: n / eps must exceed 1");
  DxgParams p;
  p.beta = C1 * std::log(ratio);
  const double sb = std::sqrt(p.beta);
  p.eta = eps * C2 * C2 / (sb * std::log(static_cast<double>(n)));
  p.eta_mu = p.eta;
  p.tau_mu = 15.0 * C2 * sb;
  p.tau_p = C2 / sb;
  p.alpha = C3;
  return p;
}

DxgParams params_loose(std::size_t n, double eps, double min_c, double cost_sup) {
  if (n < 2 || !(eps > 0.0) || !(cost_sup > 0.0)) throw std::invalid_argument("params_loose: bad inputs");
  if (!(min_c > 0.0)) throw std::invalid_argument("params_loose: min c must be positive");
  const double nd = static_cast<double>(n);
  const double min_ct = min_c + 1.0 / nd;
  DxgParams p;
  p.alpha = 1.0;
  p.beta = std::log(3.0);
  // min c = 1 would make the first bound infinite; the second bound still applies.
  const double first = min_c < 1.0 ? cost_sup / -std::log(min_c) : std::numeric_limits<double>::infinity();
  p.eta = std::min(first, eps / (16.0 * std::log(nd)));
  p.tau_mu = 1.0 / (4.0 * std::sqrt(nd));
  p.tau_p = min_ct / (1.0 / std::sqrt(nd) + p.eta * min_ct);
  p.eta_mu = std::min(eps / (16.0 * std::log(2.0)), p.eta * p.tau_p / p.tau_mu);
  return p;
}

double LogOddsField::difference(std::size_t j) const { return std::tanh(0.5 * delta[j]); }

DxgState initial_state(std::size_t n) {
  DxgState s;
  s.mu.delta.assign(n, 0.0);
  s.weights.b.assign(n, 0.0);
  return s;
}

std::vector<double> perturbed_marginal(const Histogram& c, double alpha) {
  std::vector<double> out(c.vector());
  const double add = alpha / static_cast<double>(c.size());
  for (double& v : out) v += add;
  return out;
}

double s_closed_form(double tau_p, double eta, std::size_t t) {
  return 1.0 - std::pow(1.0 - tau_p * eta, static_cast<double>(t));
}

void implicit_row(const TransportLogWeights& w, const CostKernel& kernel, std::size_t i, std::span<double> out) {
  kernel.row(i, out);
  detail::softmax_in_place(w.a, w.b, out);
}

std::vector<double> column_marginal(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r,
                                    unsigned workers) {
  return detail::plan_pass(w.a, w.b, kernel, r.weights(), workers).col_marginal;
}

DenseCoupling materialize_plan(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r) {
  const std::size_t n = kernel.size();
  DenseCoupling out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    implicit_row(w, kernel, i, row);
    for (double& v : row) v *= r[i];
  }
  return out;
}

LogOddsField dual_md_step(const LogOddsField& mu, std::span<const double> col_marginal, const Histogram& c,
                          std::span<const double> c_tilde, const DxgParams& params, double cost_sup) {
  const std::size_t n = mu.size();
  LogOddsField out;
  out.delta.resize(n);
  const double decay = 1.0 - params.tau_mu * params.eta_mu;
  const double gain = 4.0 * params.tau_mu * cost_sup;
  for (std::size_t j = 0; j < n; ++j) {
    out.delta[j] = decay * mu.delta[j] + gain * (col_marginal[j] - c[j]) / c_tilde[j];
  }
  return out;
}

LogOddsField balance(LogOddsField mu, double beta) {
  for (double& d : mu.delta) d = std::clamp(d, -beta, beta);
  return mu;
}

DxgState dxg_step(const DxgState& state, const CostKernel& kernel, const Histogram& r, const Histogram& c,
                  std::span<const double> c_tilde, const DxgParams& params, unsigned workers) {
  const std::size_t n = kernel.size();
  const double sup = kernel.sup();
  const double decay = 1.0 - params.tau_p * params.eta;
  const TransportLogWeights& w = state.weights;

  const auto cm0 = column_marginal(w, kernel, r, workers);
  const LogOddsField mid_mu = dual_md_step(state.mu, cm0, c, c_tilde, params, sup);

  TransportLogWeights mid;
  mid.a = decay * w.a + params.tau_p;
  mid.b.resize(n);
  for (std::size_t j = 0; j < n; ++j) mid.b[j] = decay * w.b[j] + 2.0 * params.tau_p * sup * state.mu.difference(j);

  const auto cm1 = column_marginal(mid, kernel, r, workers);
  DxgState next;
  next.mu = balance(dual_md_step(state.mu, cm1, c, c_tilde, params, sup), params.beta);

  TransportLogWeights& nw = next.weights;
  nw.a = mid.a;
  nw.b.resize(n);
  for (std::size_t j = 0; j < n; ++j) nw.b[j] = decay * w.b[j] + 2.0 * params.tau_p * sup * mid_mu.difference(j);
  const double top = *std::max_element(nw.b.begin(), nw.b.end());
  for (double& v : nw.b) v -= top;
  // s_{t+1} = (1 - tau eta) s_t + tau eta, kept as a decaying complement
  nw.s = 1.0 - decay * (1.0 - w.s);
  nw.t = w.t + 1;
  return next;
}

DxgState dxg_step(const DxgState& state, const CostKernel& kernel, const Histogram& r, const Histogram& c,
                  const DxgParams& params, unsigned workers) {
  const auto ct = perturbed_marginal(c, params.alpha);
  return dxg_step(state, kernel, r, c, ct, params, workers);
}

double primal_penalized_value(const TransportLogWeights& w, const CostKernel& kernel, const Histogram& r,
                              const Histogram& c, double eta, unsigned workers) {
  const auto pass = detail::plan_pass(w.a, w.b, kernel, r.weights(), workers);
  const double penalty = 2.0 * kernel.sup() * l1_distance(pass.col_marginal, c.weights());
  double value = pass.cost + penalty;
  if (eta > 0.0) value -= eta * (entropy(r.weights()) + pass.row_entropy);
  return value;
}

double dual_penalized_value(const LogOddsField& mu, const CostKernel& kernel, const Histogram& r,
                            const Histogram& c, double eta, unsigned workers) {
  const std::size_t n = kernel.size();
  const double sup = kernel.sup();
  std::vector<double> d(n);
  double lin = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = 2.0 * sup * mu.difference(j);
    lin += c[j] * d[j];
  }
  std::vector<double> per_row(n);
  detail::for_blocks(n, workers, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<double> buf(n);
    for (std::size_t i = b; i < e; ++i) {
      kernel.row(i, buf);
      if (eta > 0.0) {
        for (std::size_t j = 0; j < n; ++j) buf[j] = -(buf[j] + d[j]) / eta;
        per_row[i] = -eta * lse(buf);
      } else {
        double lo = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) lo = std::min(lo, buf[j] + d[j]);
        per_row[i] = lo;
      }
    }
  });
  double rows = 0.0;
  for (std::size_t i = 0; i < n; ++i) rows += r[i] * per_row[i];
  double value = -lin + rows;
  if (eta > 0.0) value -= eta * entropy(r.weights());
  return value;
}

DualPotentials recover_eot_potentials(const LogOddsField& mu, const CostKernel& kernel, const Histogram& r,
                                      double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("recover_eot_potentials: eta must be positive");
  if (!r.full_support()) throw std::invalid_argument("recover_eot_potentials: r must have full support");
  const std::size_t n = kernel.size();
  const double sup = kernel.sup();
  DualPotentials pot;
  pot.eta = eta;
  pot.psi.resize(n);
  pot.phi.resize(n);
  for (std::size_t j = 0; j < n; ++j) pot.psi[j] = -2.0 * sup * mu.difference(j);
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.row(i, buf);
    for (std::size_t j = 0; j < n; ++j) buf[j] = (pot.psi[j] - buf[j]) / eta;
    pot.phi[i] = eta * (std::log(r[i]) - lse(buf));
  }
  return center_potentials(std::move(pot));
}

DxgSolution dxg_solve(const CostKernel& kernel, const Histogram& r, const Histogram& c, const DxgParams& params,
                      const Termination& term, std::size_t dense_cap) {
  const std::size_t n = kernel.size();
  if (r.size() != n || c.size() != n) throw std::invalid_argument("dxg_solve: marginal size mismatch");
  params.validate();
  const auto ct = perturbed_marginal(c, params.alpha);
  for (double v : ct) {
    if (!(v > 0.0)) throw std::invalid_argument("dxg_solve: c + alpha/n must be positive; use alpha > 0");
  }

  DxgSolution sol;
  sol.workers = detail::block_count(n, term.workers);
  const Stopwatch clock(term.timing);
  const std::size_t stride = std::max<std::size_t>(term.log_stride, 1);
  const double scale = kernel.raw_sup();
  const double target = term.eps / 6.0;
  double best_score = std::numeric_limits<double>::infinity();

  DxgState state = initial_state(n);
  for (std::size_t t = 0;; ++t) {
    const bool last = t >= term.max_iter || clock.elapsed() > term.timeout_seconds;
    if (t % stride == 0 || last) {
      const auto pass = detail::plan_pass(state.weights.a, state.weights.b, kernel, r.weights(), sol.workers);
      const double infeas = l1_distance(pass.col_marginal, c.weights());
      double primal = pass.cost + 2.0 * kernel.sup() * infeas;
      if (params.eta > 0.0) primal -= params.eta * (entropy(r.weights()) + pass.row_entropy);
      const double dual = dual_penalized_value(state.mu, kernel, r, c, params.eta, sol.workers);
      const double gap = primal - dual;

      TrajectoryRow row{t, clock.logged(), primal * scale, dual * scale, gap * scale, infeas, state.weights.s};
      sol.trajectory.push_back(row);
      if (term.sink) term.sink(row);

      const double score = gap + infeas;
      if (score < best_score) {
        best_score = score;
        sol.state = state;
        sol.best_iter = t;
        sol.primal = row.primal;
        sol.dual = row.dual;
        sol.gap = row.gap;
        sol.col_infeas_l1 = infeas;
      }
      if (gap <= target && infeas <= target) {
        sol.converged = true;
        sol.iterations = t;
        break;
      }
    }
    if (last) {
      sol.iterations = t;
      break;
    }
    state = dxg_step(state, kernel, r, c, ct, params, sol.workers);
  }

  if (n <= dense_cap) {
    DenseCoupling plan = round_to_polytope(materialize_plan(sol.state.weights, kernel, r), r, c);
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) cost += kernel(i, j) * plan(i, j);
    }
    sol.rounded_cost = cost * scale;
    sol.rounded_plan = std::move(plan);
  }
  return sol;
}

}  // namespace dualot
