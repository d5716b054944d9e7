#include "dualot/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "dualot/sinkhorn.hpp"

namespace dualot {
namespace {

constexpr double kPricingTol = 1e-12;

struct Cell {
  std::size_t i, j;
  double x;
};

class TransportSimplex {
 public:
  TransportSimplex(const DenseCoupling& cost, std::span<const double> r, std::span<const double> c)
      : C_(cost), n_(cost.rows()), m_(cost.cols()) {
    northwest_corner(r, c);
  }

  ExactSolution run() {
    ExactSolution out;
    for (;;) {
      potentials();
      std::size_t enter_i = 0, enter_j = 0;
      if (!entering(enter_i, enter_j)) break;
      pivot(enter_i, enter_j);
      ++out.pivots;
    }
    out.plan = DenseCoupling(n_, m_);
    for (const Cell& cell : basis_) {
      out.plan(cell.i, cell.j) = cell.x;
      out.value += C_(cell.i, cell.j) * cell.x;
    }
    out.u = u_;
    out.v = v_;
    return out;
  }

 private:
  // On a tie both supply and demand are exhausted; advancing the row alone
  // keeps a degenerate zero cell so the basis has n + m - 1 cells.
  void northwest_corner(std::span<const double> r, std::span<const double> c) {
    std::vector<double> a(r.begin(), r.end()), b(c.begin(), c.end());
    std::size_t i = 0, j = 0;
    for (;;) {
      const double x = std::min(a[i], b[j]);
      basis_.push_back({i, j, x});
      if (i + 1 == n_ && j + 1 == m_) break;
      const bool row_done = a[i] <= b[j];
      a[i] -= x;
      b[j] -= x;
      if ((row_done && i + 1 < n_) || j + 1 == m_) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // u_i + v_j = C_ij on every basic cell, rooted at u_0 = 0.
  void potentials() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    u_.assign(n_, nan);
    v_.assign(m_, nan);
    build_adjacency();
    u_[0] = 0.0;
    std::queue<std::size_t> q;  // nodes: rows 0..n-1, columns n..n+m-1
    q.push(0);
    while (!q.empty()) {
      const std::size_t node = q.front();
      q.pop();
      for (std::size_t e : adj_[node]) {
        const Cell& cell = basis_[e];
        if (node < n_) {
          if (std::isnan(v_[cell.j])) {
            v_[cell.j] = C_(cell.i, cell.j) - u_[cell.i];
            q.push(n_ + cell.j);
          }
        } else if (std::isnan(u_[cell.i])) {
          u_[cell.i] = C_(cell.i, cell.j) - v_[cell.j];
          q.push(cell.i);
        }
      }
    }
  }

  void build_adjacency() {
    adj_.assign(n_ + m_, {});
    for (std::size_t e = 0; e < basis_.size(); ++e) {
      adj_[basis_[e].i].push_back(e);
      adj_[n_ + basis_[e].j].push_back(e);
    }
  }

  bool entering(std::size_t& ei, std::size_t& ej) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        if (C_(i, j) - u_[i] - v_[j] < -kPricingTol) {
          ei = i;
          ej = j;
          return true;
        }
      }
    }
    return false;
  }

  // Basis edges on the tree path from row node ei to column node ej.
  std::vector<std::size_t> tree_path(std::size_t ei, std::size_t ej) const {
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(n_ + m_, none);
    std::vector<bool> seen(n_ + m_, false);
    std::queue<std::size_t> q;
    q.push(ei);
    seen[ei] = true;
    const std::size_t goal = n_ + ej;
    while (!q.empty() && !seen[goal]) {
      const std::size_t node = q.front();
      q.pop();
      for (std::size_t e : adj_[node]) {
        const std::size_t other = node < n_ ? n_ + basis_[e].j : basis_[e].i;
        if (seen[other]) continue;
        seen[other] = true;
        via[other] = e;
        q.push(other);
      }
    }
    if (!seen[goal]) throw std::logic_error("transport simplex: basis is not a spanning tree");
    std::vector<std::size_t> path;  // from the column end back to the row end
    for (std::size_t node = goal; node != ei;) {
      const std::size_t e = via[node];
      path.push_back(e);
      node = node < n_ ? n_ + basis_[e].j : basis_[e].i;
    }
    return path;
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Walking back from column ej the path edges alternate -, +, -, ...
    const auto path = tree_path(ei, ej);
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) theta = std::min(theta, basis_[path[k]].x);
    std::size_t leave = path[0];
    std::size_t leave_index = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& cell = basis_[path[k]];
      const std::size_t index = cell.i * m_ + cell.j;
      if (cell.x <= theta && index < leave_index) {
        leave = path[k];
        leave_index = index;
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      double& x = basis_[path[k]].x;
      x = k % 2 == 0 ? std::max(x - theta, 0.0) : x + theta;
    }
    basis_[leave] = {ei, ej, theta};
  }

  const DenseCoupling& C_;
  std::size_t n_, m_;
  std::vector<Cell> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_, v_;
};

}  // namespace

ExactSolution exact_ot(const DenseCoupling& cost, const Histogram& r, const Histogram& c) {
  if (cost.rows() != r.size() || cost.cols() != c.size()) throw std::invalid_argument("exact_ot: shape mismatch");
  if (r.size() == 0 || c.size() == 0) throw std::invalid_argument("exact_ot: empty marginals");
  if (r.size() > kOracleMaxSize || c.size() > kOracleMaxSize) {
    throw std::invalid_argument("exact_ot: sizes above " + std::to_string(kOracleMaxSize) + " are not supported");
  }
  double sr = 0.0, sc = 0.0;
  for (double v : r.weights()) sr += v;
  for (double v : c.weights()) sc += v;
  if (std::abs(sr - sc) > 1e-9) throw std::invalid_argument("exact_ot: marginals have different mass");
  for (double v : cost.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("exact_ot: costs must be finite");
  }
  return TransportSimplex(cost, r.weights(), c.weights()).run();
}

ExactSolution exact_ot(const CostKernel& kernel, const Histogram& r, const Histogram& c) {
  if (kernel.size() > kOracleMaxSize) {
    throw std::invalid_argument("exact_ot: sizes above " + std::to_string(kOracleMaxSize) + " are not supported");
  }
  return exact_ot(kernel.dense(), r, c);
}

DenseCoupling exact_eot_small(const CostKernel& kernel, const Histogram& r, const Histogram& c, double eta) {
  const std::size_t n = kernel.size();
  if (n > 16) throw std::invalid_argument("exact_eot_small: n must be <= 16");
  if (!(eta > 0.0)) throw std::invalid_argument("exact_eot_small: eta must be positive");
  const auto res = sinkhorn_solve(kernel, r, c, eta, 1e-13, 10000000);
  const DenseCoupling plan = sinkhorn_plan(res.potentials, kernel);

  // Stationarity: eta log pi_ij + C_ij - phi_i - psi_j is one constant.
  const auto& pot = res.potentials;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (plan(i, j) <= 0.0) continue;
      const double s = eta * std::log(plan(i, j)) + kernel(i, j) - pot.phi[i] - pot.psi[j];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  const double residual =
      std::max({l1_distance(plan.row_marginal(), r.weights()), l1_distance(plan.col_marginal(), c.weights()), hi - lo});
  if (!res.converged || residual > 1e-9) {
    throw std::runtime_error("exact_eot_small: first-order residual " + std::to_string(residual) + " above 1e-9");
  }
  return plan;
}

}  // namespace dualot
