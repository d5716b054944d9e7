#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dualot/barycenter.hpp"
#include "dualot/sinkhorn.hpp"
#include "support.hpp"

using namespace dualot;

namespace {

BarycenterState random_state(std::size_t n, std::vector<double> w, testing::Rng& rng) {
  auto s = initial_barycenter_state(n, std::move(w));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& mu : s.mu) {
    for (double& d : mu.delta) d = u(rng);
  }
  for (auto& b : s.b) {
    for (double& v : b) v = u(rng);
  }
  s.a = 1.0 + u(rng);
  return s;
}

// log Z_{k,i} = LSE_j(-(a C_ij + b_kj)) on a dense cost
std::vector<std::vector<double>> log_partitions(const std::vector<double>& C, std::size_t n, double a,
                                                const std::vector<std::vector<double>>& b) {
  std::vector<std::vector<double>> out(b.size(), std::vector<double>(n));
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < n; ++j) z += std::exp(-(a * C[i * n + j] + b[k][j]));
      out[k][i] = std::log(z);
    }
  }
  return out;
}

std::vector<double> dense_barycenter(const std::vector<double>& C, std::size_t n, double a,
                                     const std::vector<std::vector<double>>& b, const std::vector<double>& w) {
  const auto lz = log_partitions(C, n, a, b);
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) e += w[k] * lz[k][i];
    r[i] = std::exp(e);
  }
  const double z = testing::sum(r);
  for (double& v : r) v /= z;
  return r;
}

// One step of the barycenter method on dense matrices.
BarycenterState dense_step(const BarycenterState& s, const std::vector<double>& C, std::size_t n,
                           const std::vector<Histogram>& cs, const DxgParams& p) {
  const std::size_t m = s.mu.size();
  const double dp = 1.0 - p.tau_p * p.eta, dm = 1.0 - p.tau_mu * p.eta_mu;
  auto md = [&](const std::vector<double>& delta, const std::vector<double>& cm, std::size_t k) {
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double ct = cs[k][j] + p.alpha / n;
      out[j] = dm * delta[j] + 4.0 * p.tau_mu * (cm[j] - cs[k][j]) / ct;
    }
    return out;
  };
  const auto r0 = dense_barycenter(C, n, s.a, s.b, s.w);
  std::vector<std::vector<double>> mid(m), bbar(m);
  for (std::size_t k = 0; k < m; ++k) {
    mid[k] = md(s.mu[k].delta, testing::col_sums(testing::naive_plan(C, n, s.a, s.b[k], r0), n), k);
    bbar[k].resize(n);
    for (std::size_t j = 0; j < n; ++j) bbar[k][j] = dp * s.b[k][j] + 2.0 * p.tau_p * std::tanh(s.mu[k].delta[j] / 2);
  }
  const double abar = dp * s.a + p.tau_p;
  const auto r1 = dense_barycenter(C, n, abar, bbar, s.w);
  BarycenterState out = s;
  out.a = abar;
  out.s = dp * s.s + p.tau_p * p.eta;
  out.t = s.t + 1;
  for (std::size_t k = 0; k < m; ++k) {
    auto d = md(s.mu[k].delta, testing::col_sums(testing::naive_plan(C, n, abar, bbar[k], r1), n), k);
    for (double& v : d) v = std::min(p.beta, std::max(-p.beta, v));
    out.mu[k].delta = d;
    for (std::size_t j = 0; j < n; ++j) out.b[k][j] = dp * s.b[k][j] + 2.0 * p.tau_p * std::tanh(mid[k][j] / 2);
    const double top = *std::max_element(out.b[k].begin(), out.b[k].end());
    for (double& v : out.b[k]) v -= top;
  }
  return out;
}

DxgParams small_params(double eta) {
  DxgParams p;
  p.eta = eta;
  p.tau_p = p.tau_mu = 0.3;
  p.beta = 1.1;
  p.alpha = 0.01;
  return p;
}

}  // namespace

TEST_CASE("uniform state gives the uniform barycenter") {
  const auto k = CostKernel::grid(3, 3, 2);
  const auto s = initial_barycenter_state(9, {1.0, 1.0});
  const auto r = barycenter_marginal(s, k, 0.1);
  for (double v : r.weights()) CHECK(std::abs(v - 1.0 / 9) < 1e-16);
  CHECK_THROWS_AS(barycenter_marginal(s, k, 0.0), std::invalid_argument);
}

TEST_CASE("single marginal barycenter is proportional to the partition function") {
  testing::Rng rng(1);
  const auto k = CostKernel::grid(3, 2, 1);
  const auto s = random_state(6, {1.0}, rng);
  const auto lz = log_partitions(testing::dense_costs(k), 6, s.a, s.b);
  std::vector<double> z(6);
  for (std::size_t i = 0; i < 6; ++i) z[i] = std::exp(lz[0][i]);
  const double total = testing::sum(z);
  const auto r = barycenter_marginal(s, k, 0.2);
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(r[i] - z[i] / total) < 1e-15);
}

TEST_CASE("barycenter map minimizes the r objective") {
  testing::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4;
    const auto k = testing::random_kernel(n, rng);
    const auto s = random_state(n, {0.3, 0.7}, rng);
    const auto lz = log_partitions(testing::dense_costs(k), n, s.a, s.b);
    // F(r) = <r, log r> - sum_k w_k <r, log Z_k>, up to the positive factor eta
    auto grad = [&](const std::vector<double>& x) {
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::log(std::max(x[i], 1e-300)) + 1.0 - s.w[0] * lz[0][i] - s.w[1] * lz[1][i];
      }
      return g;
    };
    const auto oracle = testing::minimize_on_simplex(grad, n, 0.05, 20000);
    const auto r = barycenter_marginal(s, k, 1e-3);
    CHECK(testing::max_abs_diff(r.vector(), oracle) < 1e-8);
  }
}

TEST_CASE("one step matches a dense reference") {
  testing::Rng rng(3);
  const std::size_t n = 4;
  const auto k = testing::random_kernel(n, rng);
  const auto C = testing::dense_costs(k);
  for (std::size_t m : {1u, 2u}) {
    std::vector<Histogram> cs;
    for (std::size_t q = 0; q < m; ++q) cs.push_back(testing::random_histogram(n, rng));
    auto s = random_state(n, std::vector<double>(m, 1.0), rng);
    const auto p = small_params(0.05);
    for (int step = 0; step < 3; ++step) {
      const auto got = dxgb_step(s, k, cs, p);
      const auto want = dense_step(s, C, n, cs, p);
      CHECK(std::abs(got.a - want.a) < 1e-12);
      CHECK(std::abs(got.s - want.s) < 1e-12);
      for (std::size_t q = 0; q < m; ++q) {
        CHECK(testing::max_abs_diff(got.mu[q].delta, want.mu[q].delta) < 1e-12);
        CHECK(testing::max_abs_diff(got.b[q], want.b[q]) < 1e-12);
      }
      s = got;
    }
  }
}

TEST_CASE("zero cost with a uniform marginal is a fixed point") {
  const std::size_t n = 5;
  const auto k = CostKernel::explicit_matrix(std::vector<double>(n * n, 0.0), n);
  auto s = initial_barycenter_state(n, {1.0});
  const auto p = small_params(0.1);
  for (int t = 0; t < 5; ++t) s = dxgb_step(s, k, {Histogram::uniform(n)}, p);
  for (double d : s.mu[0].delta) CHECK(d == 0.0);
  for (double b : s.b[0]) CHECK(b == 0.0);
}

TEST_CASE("identical marginals keep identical states") {
  testing::Rng rng(4);
  const auto k = CostKernel::grid(3, 3, 2);
  const auto c = testing::random_histogram(9, rng);
  auto s = initial_barycenter_state(9, {1.0, 1.0, 1.0});
  for (int t = 0; t < 20; ++t) s = dxgb_step(s, k, {c, c, c}, small_params(0.01));
  CHECK(s.mu[0].delta == s.mu[1].delta);
  CHECK(s.mu[1].delta == s.mu[2].delta);
  CHECK(s.b[0] == s.b[2]);
}

TEST_CASE("permuting marginals permutes states and keeps the barycenter") {
  testing::Rng rng(5);
  const auto k = CostKernel::grid(4, 3, 1);
  const std::vector<Histogram> cs{testing::random_histogram(12, rng), testing::random_histogram(12, rng),
                                  testing::random_histogram(12, rng)};
  const std::vector<double> w{0.2, 0.3, 0.5};
  auto a = initial_barycenter_state(12, w);
  auto b = initial_barycenter_state(12, {w[2], w[0], w[1]});
  const std::vector<Histogram> permuted{cs[2], cs[0], cs[1]};
  for (int t = 0; t < 25; ++t) {
    a = dxgb_step(a, k, cs, small_params(0.01));
    b = dxgb_step(b, k, permuted, small_params(0.01));
  }
  CHECK(barycenter_marginal(a, k, 0.01).vector() == barycenter_marginal(b, k, 0.01).vector());
  CHECK(a.mu[2].delta == b.mu[0].delta);
  CHECK(a.b[0] == b.b[1]);
}

TEST_CASE("weights are normalized") {
  const auto a = initial_barycenter_state(4, {1.0, 2.0, 3.0});
  const auto b = initial_barycenter_state(4, {2.0, 4.0, 6.0});
  CHECK(a.w == b.w);
  CHECK(std::abs(testing::sum(a.w) - 1.0) < 1e-15);
  CHECK_THROWS_AS(initial_barycenter_state(4, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(initial_barycenter_state(4, {}), std::invalid_argument);
}

TEST_CASE("objective values") {
  testing::Rng rng(6);
  const std::size_t n = 4;
  const auto k = testing::random_kernel(n, rng);
  const auto C = testing::dense_costs(k);
  // uniform state with uniform targets: plans are feasible
  const auto u = Histogram::uniform(n);
  const auto s0 = initial_barycenter_state(n, {0.4, 0.6});
  double cost = 0.0;
  for (double v : C) cost += v / (n * n);
  CHECK(std::abs(barycenter_objective(s0, k, {u, u}, 0.0) - cost) < 1e-15);

  const auto s = random_state(n, {0.4, 0.6}, rng);
  const std::vector<Histogram> cs{testing::random_histogram(n, rng), testing::random_histogram(n, rng)};
  const double eta = 0.02;
  const auto r = dense_barycenter(C, n, s.a, s.b, s.w);
  double want = 0.0;
  for (std::size_t q = 0; q < 2; ++q) {
    const auto P = testing::naive_plan(C, n, s.a, s.b[q], r);
    double v = 0.0;
    for (std::size_t e = 0; e < n * n; ++e) v += C[e] * P[e];
    v += 2.0 * l1_distance(testing::col_sums(P, n), cs[q].weights()) - eta * entropy(P);
    want += s.w[q] * v;
  }
  CHECK(std::abs(barycenter_objective(s, k, cs, eta) - want) < 1e-12);

  // a single marginal reduces to the transport objective with r from the map
  const auto one = random_state(n, {1.0}, rng);
  const auto r1 = barycenter_marginal(one, k, eta);
  TransportLogWeights tw{one.a, one.b[0], 0.0, 0};
  CHECK(std::abs(barycenter_objective(one, k, {cs[0]}, eta) - primal_penalized_value(tw, k, r1, cs[0], eta)) <
        1e-14);
}

TEST_CASE("dual value bounds the objective") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 7;
    const auto k = testing::random_kernel(n, rng);
    const auto s = random_state(n, {0.5, 0.25, 0.25}, rng);
    const auto dual_state = random_state(n, {0.5, 0.25, 0.25}, rng);
    auto mixed = s;
    mixed.mu = dual_state.mu;
    const std::vector<Histogram> cs{testing::random_histogram(n, rng), testing::random_histogram(n, rng),
                                    testing::random_histogram(n, rng)};
    CHECK(barycenter_dual_value(mixed, k, cs, 1e-2) <= barycenter_objective(s, k, cs, 1e-2));
  }
}

TEST_CASE("single marginal solve returns roughly the marginal") {
  testing::Rng rng(8);
  const auto k = CostKernel::grid(4, 4, 2);
  const auto c = testing::random_histogram(16, rng, 0.2);
  const double eta = 1e-2;
  Termination term;
  term.max_iter = 4000;
  term.eps = 1e-9;
  const auto sol = dxgb_solve(k, {c}, {1.0}, small_params(eta), term);
  const auto ibp = ibp_barycenter(k, {c}, {1.0}, eta, 1e-12, 10000);
  CHECK(l1_distance(sol.barycenter.weights(), c.weights()) <= eta * std::log(16.0));
  CHECK(l1_distance(sol.barycenter.weights(), ibp.barycenter.weights()) <= eta * std::log(16.0));
  CHECK(sol.col_infeas_l1.size() == 1);
}

TEST_CASE("two spikes meet in the middle") {
  const std::size_t n = 21;
  const auto k = CostKernel::grid(n, 1, 2);
  std::vector<double> a(n, 1e-6), b(n, 1e-6);
  a[3] = 1.0;
  b[15] = 1.0;
  Termination term;
  term.max_iter = 5000;
  term.log_stride = 500;
  const auto sol = dxgb_solve(k, {Histogram::normalized(a), Histogram::normalized(b)}, {0.5, 0.5},
                              small_params(1e-3), term);
  const auto& w = sol.barycenter.vector();
  CHECK(std::max_element(w.begin(), w.end()) - w.begin() == 9);
}

TEST_CASE("barycenter solve rejects eta = 0") {
  const auto k = CostKernel::grid(2, 2, 1);
  const auto u = Histogram::uniform(4);
  CHECK_THROWS_AS(dxgb_solve(k, {u}, {1.0}, small_params(0.0)), std::invalid_argument);
}
