#include "dualot/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/parallel.hpp"
#include "detail/plan_pass.hpp"

namespace dualot {
namespace {

void check_inputs(const CostKernel& kernel, const std::vector<Histogram>& marginals, std::size_t m) {
  if (marginals.size() != m) throw std::invalid_argument("barycenter: one marginal per dual state required");
  for (const auto& c : marginals) {
    if (c.size() != kernel.size()) throw std::invalid_argument("barycenter: marginal size mismatch");
  }
}

// Sums the per-marginal terms in value order, so that permuting the
// marginals leaves the result bitwise unchanged.
double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double v : terms) acc += v;
  return acc;
}

// log r (unnormalized) for shared a and per-marginal b_k.
std::vector<double> log_barycenter(double a, const std::vector<std::vector<double>>& b,
                                   const std::vector<double>& w, const CostKernel& kernel, unsigned workers) {
  const std::size_t n = kernel.size();
  std::vector<double> out(n, 0.0);
  detail::for_blocks(n, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> c_row(n), x(n), terms(b.size());
    for (std::size_t i = begin; i < end; ++i) {
      kernel.row(i, c_row);
      for (std::size_t k = 0; k < b.size(); ++k) {
        for (std::size_t j = 0; j < n; ++j) x[j] = -(a * c_row[j] + b[k][j]);
        terms[k] = w[k] * lse(x);
      }
      out[i] = sorted_sum(terms);
    }
  });
  return out;
}

Histogram to_histogram(const std::vector<double>& log_r) {
  const double z = lse(log_r);
  std::vector<double> r(log_r.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::exp(log_r[i] - z);
  return Histogram::normalized(std::move(r));
}

std::vector<double> normalize_weights(std::vector<double> w) {
  if (w.empty()) throw std::invalid_argument("barycenter: no weights");
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("barycenter: weights must be positive");
  }
  std::vector<double> sorted = w;
  const double sum = sorted_sum(sorted);
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

BarycenterState initial_barycenter_state(std::size_t n, std::vector<double> weights) {
  BarycenterState s;
  s.w = normalize_weights(std::move(weights));
  const std::size_t m = s.w.size();
  s.mu.assign(m, LogOddsField{std::vector<double>(n, 0.0)});
  s.b.assign(m, std::vector<double>(n, 0.0));
  return s;
}

Histogram barycenter_marginal(const BarycenterState& state, const CostKernel& kernel, double eta,
                              unsigned workers) {
  if (!(eta > 0.0)) throw std::invalid_argument("barycenter_marginal: eta must be positive");
  return to_histogram(log_barycenter(state.a, state.b, state.w, kernel, workers));
}

BarycenterState dxgb_step(const BarycenterState& state, const CostKernel& kernel,
                          const std::vector<Histogram>& marginals, const DxgParams& params, unsigned workers) {
  const std::size_t m = state.marginals();
  const std::size_t n = kernel.size();
  check_inputs(kernel, marginals, m);
  const double sup = kernel.sup();
  const double decay = 1.0 - params.tau_p * params.eta;

  const Histogram r0 = barycenter_marginal(state, kernel, params.eta, workers);
  std::vector<std::vector<double>> c_tilde(m);
  std::vector<LogOddsField> mid_mu(m);
  for (std::size_t k = 0; k < m; ++k) {
    c_tilde[k] = perturbed_marginal(marginals[k], params.alpha);
    const auto cm = detail::plan_pass(state.a, state.b[k], kernel, r0.weights(), workers).col_marginal;
    mid_mu[k] = dual_md_step(state.mu[k], cm, marginals[k], c_tilde[k], params, sup);
  }

  BarycenterState mid;
  mid.w = state.w;
  mid.a = decay * state.a + params.tau_p;
  mid.b.assign(m, std::vector<double>(n));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      mid.b[k][j] = decay * state.b[k][j] + 2.0 * params.tau_p * sup * state.mu[k].difference(j);
    }
  }
  const Histogram r1 = barycenter_marginal(mid, kernel, params.eta, workers);

  BarycenterState next;
  next.w = state.w;
  next.a = mid.a;
  next.s = 1.0 - decay * (1.0 - state.s);
  next.t = state.t + 1;
  next.mu.resize(m);
  next.b.assign(m, std::vector<double>(n));
  for (std::size_t k = 0; k < m; ++k) {
    const auto cm = detail::plan_pass(mid.a, mid.b[k], kernel, r1.weights(), workers).col_marginal;
    next.mu[k] = balance(dual_md_step(state.mu[k], cm, marginals[k], c_tilde[k], params, sup), params.beta);
    auto& bk = next.b[k];
    for (std::size_t j = 0; j < n; ++j) {
      bk[j] = decay * state.b[k][j] + 2.0 * params.tau_p * sup * mid_mu[k].difference(j);
    }
    const double top = *std::max_element(bk.begin(), bk.end());
    for (double& v : bk) v -= top;
  }
  return next;
}

double barycenter_objective(const BarycenterState& state, const CostKernel& kernel,
                            const std::vector<Histogram>& marginals, double eta, unsigned workers) {
  check_inputs(kernel, marginals, state.marginals());
  // Entropy needs r; at eta = 0 any fixed-support r is meaningless, so
  // fall back to the uniform map only for the row weights.
  const Histogram r = eta > 0.0 ? barycenter_marginal(state, kernel, eta, workers) : Histogram::uniform(kernel.size());
  const double h_r = entropy(r.weights());
  double total = 0.0;
  for (std::size_t k = 0; k < state.marginals(); ++k) {
    const auto pass = detail::plan_pass(state.a, state.b[k], kernel, r.weights(), workers);
    double v = pass.cost + 2.0 * kernel.sup() * l1_distance(pass.col_marginal, marginals[k].weights());
    if (eta > 0.0) v -= eta * (h_r + pass.row_entropy);
    total += state.w[k] * v;
  }
  return total;
}

double barycenter_dual_value(const BarycenterState& state, const CostKernel& kernel,
                             const std::vector<Histogram>& marginals, double eta, unsigned workers) {
  if (!(eta > 0.0)) throw std::invalid_argument("barycenter_dual_value: eta must be positive");
  const std::size_t m = state.marginals();
  const std::size_t n = kernel.size();
  check_inputs(kernel, marginals, m);
  const double sup = kernel.sup();
  std::vector<std::vector<double>> d(m, std::vector<double>(n));
  double lin = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      d[k][j] = 2.0 * sup * state.mu[k].difference(j);
      lin += state.w[k] * marginals[k][j] * d[k][j];
    }
  }
  std::vector<double> acc(n, 0.0);
  detail::for_blocks(n, workers, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<double> c_row(n), x(n), terms(m);
    for (std::size_t i = begin; i < end; ++i) {
      kernel.row(i, c_row);
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < n; ++j) x[j] = -(c_row[j] + d[k][j]) / eta;
        terms[k] = state.w[k] * lse(x);
      }
      acc[i] = sorted_sum(terms);
    }
  });
  return -lin - eta * lse(acc);
}

BarycenterSolution dxgb_solve(const CostKernel& kernel, const std::vector<Histogram>& marginals,
                              std::vector<double> weights, const DxgParams& params, const Termination& term) {
  params.validate();
  if (!(params.eta > 0.0)) throw std::invalid_argument("dxgb_solve: eta must be positive");
  const std::size_t n = kernel.size();
  BarycenterState state = initial_barycenter_state(n, std::move(weights));
  check_inputs(kernel, marginals, state.marginals());
  for (const auto& c : marginals) {
    for (double v : perturbed_marginal(c, params.alpha)) {
      if (!(v > 0.0)) throw std::invalid_argument("dxgb_solve: c_k + alpha/n must be positive");
    }
  }

  BarycenterSolution sol;
  const unsigned workers = detail::block_count(n, term.workers);
  const Stopwatch clock(term.timing);
  const std::size_t stride = std::max<std::size_t>(term.log_stride, 1);
  const double scale = kernel.raw_sup();
  const double target = term.eps / 6.0;

  for (std::size_t t = 0;; ++t) {
    const bool last = t >= term.max_iter || clock.elapsed() > term.timeout_seconds;
    if (t % stride == 0 || last) {
      const Histogram r = barycenter_marginal(state, kernel, params.eta, workers);
      std::vector<double> infeas(state.marginals());
      for (std::size_t k = 0; k < infeas.size(); ++k) {
        const auto cm = detail::plan_pass(state.a, state.b[k], kernel, r.weights(), workers).col_marginal;
        infeas[k] = l1_distance(cm, marginals[k].weights());
      }
      const double primal = barycenter_objective(state, kernel, marginals, params.eta, workers);
      const double dual = barycenter_dual_value(state, kernel, marginals, params.eta, workers);
      const double worst = *std::max_element(infeas.begin(), infeas.end());
      TrajectoryRow row{t, clock.logged(), primal * scale, dual * scale, (primal - dual) * scale, worst, state.s};
      sol.trajectory.push_back(row);
      if (term.sink) term.sink(row);
      sol.col_infeas_l1 = infeas;
      sol.gap = row.gap;
      sol.iterations = t;
      if (primal - dual <= target && worst <= target) {
        sol.converged = true;
        break;
      }
    }
    if (last) break;
    state = dxgb_step(state, kernel, marginals, params, workers);
  }
  sol.barycenter = barycenter_marginal(state, kernel, params.eta, workers);
  sol.state = std::move(state);
  return sol;
}

}  // namespace dualot
