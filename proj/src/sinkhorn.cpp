#include "dualot/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "detail/parallel.hpp"

namespace dualot {
namespace {

void require_full_support(const Histogram& h, const char* what) {
  if (!h.full_support()) throw std::invalid_argument(std::string(what) + " must have full support");
}

// out_i = LSE_j((g_j - C_ij) / eta) for all rows i.
void row_lse(const CostKernel& kernel, std::span<const double> g, double eta, unsigned workers,
             std::span<double> out) {
  const std::size_t n = kernel.size();
  const double inv = 1.0 / eta;
  detail::for_blocks(n, workers, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<double> buf(n);
    for (std::size_t i = b; i < e; ++i) {
      kernel.row(i, buf);
      for (std::size_t j = 0; j < n; ++j) buf[j] = (g[j] - buf[j]) * inv;
      out[i] = lse(buf);
    }
  });
}

// out_j = LSE_i((f_i - C_ij) / eta) for all columns j.
void col_lse(const CostKernel& kernel, std::span<const double> f, double eta, unsigned workers,
             std::span<double> out) {
  const std::size_t n = kernel.size();
  const double inv = 1.0 / eta;
  detail::for_blocks(n, workers, [&](std::size_t b, std::size_t e, unsigned) {
    std::vector<double> buf(n);
    for (std::size_t j = b; j < e; ++j) {
      kernel.column(j, buf);
      for (std::size_t i = 0; i < n; ++i) buf[i] = (f[i] - buf[i]) * inv;
      out[j] = lse(buf);
    }
  });
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// log Z of the potentials' unnormalized plan.
double log_partition(const DualPotentials& pot, const CostKernel& kernel) {
  std::vector<double> rows(kernel.size());
  row_lse(kernel, pot.psi, pot.eta, 1, rows);
  const double inv = 1.0 / pot.eta;
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] += pot.phi[i] * inv;
  return lse(rows);
}

// <C, pi> - eta H(pi) streamed over rows of the normalized plan.
double streamed_primal(const DualPotentials& pot, const CostKernel& kernel) {
  const std::size_t n = kernel.size();
  const double inv = 1.0 / pot.eta;
  const double logz = log_partition(pot, kernel);
  std::vector<double> cost(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    kernel.row(i, cost);
    for (std::size_t j = 0; j < n; ++j) {
      const double lp = (pot.phi[i] + pot.psi[j] - cost[j]) * inv - logz;
      const double p = std::exp(lp);
      if (p > 0.0) total += p * cost[j] + pot.eta * p * lp;
    }
  }
  return total;
}

}  // namespace

DualPotentials center_potentials(DualPotentials pot) {
  const double mf = mean(pot.phi);
  const double mg = mean(pot.psi);
  for (double& v : pot.phi) v -= mf;
  for (double& v : pot.psi) v -= mg;
  return pot;
}

SinkhornResult sinkhorn_solve(const CostKernel& kernel, const Histogram& r, const Histogram& c, double eta,
                              double tol, std::size_t max_iter, const Termination& log) {
  const std::size_t n = kernel.size();
  if (r.size() != n || c.size() != n) throw std::invalid_argument("sinkhorn: marginal size mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("sinkhorn: eta must be positive");
  require_full_support(r, "sinkhorn: r");
  require_full_support(c, "sinkhorn: c");

  std::vector<double> log_r(n), log_c(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_r[i] = std::log(r[i]);
    log_c[i] = std::log(c[i]);
  }

  SinkhornResult res;
  DualPotentials& pot = res.potentials;
  pot.eta = eta;
  pot.phi.assign(n, 0.0);
  pot.psi.assign(n, 0.0);
  std::vector<double> lse_buf(n);
  const Stopwatch clock(log.timing);
  const double scale = kernel.raw_sup();
  const std::size_t stride = std::max<std::size_t>(log.log_stride, 1);

  for (std::size_t t = 0; t < max_iter; ++t) {
    row_lse(kernel, pot.psi, eta, log.workers, lse_buf);
    for (std::size_t i = 0; i < n; ++i) pot.phi[i] = eta * (log_r[i] - lse_buf[i]);
    col_lse(kernel, pot.phi, eta, log.workers, lse_buf);
    double gap = 0.0;
    for (std::size_t j = 0; j < n; ++j) gap += std::abs(std::exp(pot.psi[j] / eta + lse_buf[j]) - c[j]);
    res.col_gap = gap;
    res.iterations = t + 1;

    const bool done = gap <= tol;
    const bool timed_out = clock.elapsed() > log.timeout_seconds;
    if (t % stride == 0 || done || timed_out || t + 1 == max_iter) {
      TrajectoryRow row;
      row.iter = t;
      row.seconds = clock.logged();
      row.primal = streamed_primal(pot, kernel) * scale;
      row.dual = eot_dual_value(pot, kernel, r, c) * scale;
      row.gap = row.primal - row.dual;
      row.col_infeas_l1 = gap;
      row.s = 1.0;
      res.trajectory.push_back(row);
      if (log.sink) log.sink(row);
    }
    if (done) {
      res.converged = true;
      break;
    }
    if (timed_out) break;
    for (std::size_t j = 0; j < n; ++j) pot.psi[j] = eta * (log_c[j] - lse_buf[j]);
    // Shift invariance: move phi's mean into psi so neither drifts.
    const double mf = mean(pot.phi);
    for (double& v : pot.phi) v -= mf;
    for (double& v : pot.psi) v += mf;
  }
  const double mf = mean(pot.phi);
  for (double& v : pot.phi) v -= mf;
  for (double& v : pot.psi) v += mf;
  return res;
}

double eot_dual_value(const DualPotentials& pot, const CostKernel& kernel, const Histogram& r, const Histogram& c) {
  if (!(pot.eta > 0.0)) throw std::invalid_argument("eot_dual_value: eta must be positive");
  double lin = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) lin += pot.phi[i] * r[i];
  for (std::size_t j = 0; j < c.size(); ++j) lin += pot.psi[j] * c[j];
  return lin - pot.eta * log_partition(pot, kernel);
}

double eot_primal_value(const DenseCoupling& pi, const CostKernel& kernel, double eta) {
  double cost = 0.0;
  for (std::size_t i = 0; i < pi.rows(); ++i) {
    for (std::size_t j = 0; j < pi.cols(); ++j) cost += kernel(i, j) * pi(i, j);
  }
  return cost - eta * entropy(pi.data());
}

DenseCoupling sinkhorn_plan(const DualPotentials& pot, const CostKernel& kernel) {
  const std::size_t n = kernel.size();
  const double inv = 1.0 / pot.eta;
  const double logz = log_partition(pot, kernel);
  DenseCoupling out(n, n);
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    kernel.row(i, cost);
    for (std::size_t j = 0; j < n; ++j) out(i, j) = std::exp((pot.phi[i] + pot.psi[j] - cost[j]) * inv - logz);
  }
  return out;
}

std::vector<double> sinkhorn_col_marginal(const DualPotentials& pot, const CostKernel& kernel) {
  const std::size_t n = kernel.size();
  std::vector<double> lse_col(n);
  col_lse(kernel, pot.phi, pot.eta, 1, lse_col);
  const double logz = log_partition(pot, kernel);
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = std::exp(pot.psi[j] / pot.eta + lse_col[j] - logz);
  return out;
}

IbpResult ibp_barycenter(const CostKernel& kernel, const std::vector<Histogram>& marginals,
                         std::vector<double> weights, double eta, double tol, std::size_t max_iter,
                         const Termination& log) {
  const std::size_t n = kernel.size();
  const std::size_t m = marginals.size();
  if (m == 0) throw std::invalid_argument("ibp: no marginals");
  if (weights.size() != m) throw std::invalid_argument("ibp: one weight per marginal required");
  if (!(eta > 0.0)) throw std::invalid_argument("ibp: eta must be positive");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("ibp: weights must be positive");
    wsum += w;
  }
  for (double& w : weights) w /= wsum;
  std::vector<std::vector<double>> log_c(m, std::vector<double>(n));
  for (std::size_t k = 0; k < m; ++k) {
    if (marginals[k].size() != n) throw std::invalid_argument("ibp: marginal size mismatch");
    require_full_support(marginals[k], "ibp: marginal");
    for (std::size_t j = 0; j < n; ++j) log_c[k][j] = std::log(marginals[k][j]);
  }

  std::vector<std::vector<double>> f(m, std::vector<double>(n, 0.0)), g = f, A = f;
  std::vector<double> L(n), log_r(n, -std::log(static_cast<double>(n)));
  IbpResult res;
  const Stopwatch clock(log.timing);
  const std::size_t stride = std::max<std::size_t>(log.log_stride, 1);
  const double scale = kernel.raw_sup();

  for (std::size_t t = 0; t < max_iter; ++t) {
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      col_lse(kernel, f[k], eta, log.workers, L);
      double gap = 0.0;
      for (std::size_t j = 0; j < n; ++j) gap += std::abs(std::exp(g[k][j] / eta + L[j]) - marginals[k][j]);
      worst = std::max(worst, gap);
      for (std::size_t j = 0; j < n; ++j) L[j] = eta * (log_c[k][j] - L[j]);
      A[k].swap(L);  // stash the projected g until all gaps are known
    }
    res.col_gap = worst;
    res.iterations = t + 1;
    // The first sweep starts from potentials whose rows do not match any r.
    const bool done = t > 0 && worst <= tol;
    const bool timed_out = clock.elapsed() > log.timeout_seconds;
    if (t > 0 && (t % stride == 0 || done || timed_out || t + 1 == max_iter)) {
      TrajectoryRow row;
      row.iter = t;
      row.seconds = clock.logged();
      const Histogram r = Histogram::normalized([&] {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = std::exp(log_r[i]);
        return v;
      }());
      for (std::size_t k = 0; k < m; ++k) {
        DualPotentials pk{f[k], g[k], eta};
        row.primal += weights[k] * streamed_primal(pk, kernel) * scale;
        row.dual += weights[k] * eot_dual_value(pk, kernel, r, marginals[k]) * scale;
      }
      row.gap = row.primal - row.dual;
      row.col_infeas_l1 = worst;
      row.s = 1.0;
      res.trajectory.push_back(row);
      if (log.sink) log.sink(row);
    }
    if (done) {
      res.converged = true;
      break;
    }
    if (timed_out) break;
    for (std::size_t k = 0; k < m; ++k) g[k].swap(A[k]);
    for (std::size_t k = 0; k < m; ++k) row_lse(kernel, g[k], eta, log.workers, A[k]);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += weights[k] * (f[k][i] / eta + A[k][i]);
      log_r[i] = acc;
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) f[k][i] = eta * (log_r[i] - A[k][i]);
    }
  }

  const double shift = lse(log_r);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(log_r[i] - shift);
  res.barycenter = Histogram::normalized(std::move(r));
  for (std::size_t k = 0; k < m; ++k) res.potentials.push_back(DualPotentials{f[k], g[k], eta});
  return res;
}

}  // namespace dualot
