#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "detail/parallel.hpp"
#include "dualot/cost_kernel.hpp"

namespace dualot::detail {

// On entry `row` holds C_i.; on exit the softmax of -(a C_ij + b_j).
inline void softmax_in_place(double a, std::span<const double> b, std::span<double> row) {
  double hi = -INFINITY;
  for (std::size_t j = 0; j < row.size(); ++j) {
    row[j] = -(a * row[j] + b[j]);
    hi = std::max(hi, row[j]);
  }
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - hi);
    sum += v;
  }
  const double inv = 1.0 / sum;
  for (double& v : row) v *= inv;
}

struct PlanPass {
  std::vector<double> col_marginal;  // c(D_r p)
  double cost = 0.0;                 // <C, D_r p>
  double row_entropy = 0.0;          // sum_i r_i H(p_i)
};

// One streamed sweep over the rows of p_ij ∝ exp(-(a C_ij + b_j)).
inline PlanPass plan_pass(double a, std::span<const double> b, const CostKernel& kernel,
                          std::span<const double> r, unsigned workers) {
  const std::size_t n = kernel.size();
  const unsigned blocks = block_count(n, workers);
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));
  std::vector<double> cost(blocks, 0.0), ent(blocks, 0.0);
  for_blocks(n, blocks, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<double> c_row(n), x(n);
    auto& acc = partial[w];
    double cost_w = 0.0, ent_w = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      kernel.row(i, c_row);
      double hi = -INFINITY;
      for (std::size_t j = 0; j < n; ++j) {
        x[j] = -(a * c_row[j] + b[j]);
        hi = std::max(hi, x[j]);
      }
      double sum = 0.0, sx = 0.0, sc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double e = std::exp(x[j] - hi);
        sum += e;
        sx += e * x[j];
        sc += e * c_row[j];
        x[j] = e;
      }
      const double inv = 1.0 / sum;
      const double ri = r[i] * inv;
      for (std::size_t j = 0; j < n; ++j) acc[j] += ri * x[j];
      cost_w += ri * sc;
      ent_w += r[i] * (std::log(sum) + hi - sx * inv);
    }
    cost[w] = cost_w;
    ent[w] = ent_w;
  });
  PlanPass out;
  out.col_marginal = std::move(partial[0]);
  out.cost = cost[0];
  out.row_entropy = ent[0];
  for (unsigned w = 1; w < blocks; ++w) {
    for (std::size_t j = 0; j < n; ++j) out.col_marginal[j] += partial[w][j];
    out.cost += cost[w];
    out.row_entropy += ent[w];
  }
  return out;
}

}  // namespace dualot::detail
