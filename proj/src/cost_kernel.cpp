#include "dualot/cost_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dualot {
namespace {

inline double ipow(double x, int p) {
  switch (p) {
    case 1: return x;
    case 2: return x * x;
    case 3: return x * x * x;
    default: return std::pow(x, p);
  }
}

void check_exponent(int p) {
  if (p < 1) throw std::invalid_argument("cost exponent must be a positive integer");
}

double color_raw(const CostKernel::Color& c, std::size_t i, std::size_t j) {
  const auto& a = c.features[i];
  const auto& b = c.features[j];
  return ipow(std::abs(a[0] - b[0]), c.p) + ipow(std::abs(a[1] - b[1]), c.p) +
         ipow(std::abs(a[2] - b[2]), c.p);
}

}  // namespace

CostKernel::CostKernel(std::variant<Explicit, Grid, Color> impl, std::size_t n, double raw_sup)
    : impl_(std::move(impl)), n_(n), raw_sup_(raw_sup), inv_sup_(raw_sup > 0.0 ? 1.0 / raw_sup : 0.0) {}

CostKernel CostKernel::explicit_matrix(std::vector<double> costs, std::size_t n,
                                       std::size_t dense_cap) {
  if (n == 0) throw std::invalid_argument("cost matrix must be nonempty");
  if (n > dense_cap) {
    throw std::invalid_argument("explicit cost matrix with n = " + std::to_string(n) +
                                " exceeds the dense cap " + std::to_string(dense_cap));
  }
  if (costs.size() != n * n) throw std::invalid_argument("cost matrix is not n x n");
  double sup = 0.0;
  for (double v : costs) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("costs must be finite and >= 0");
    sup = std::max(sup, v);
  }
  bool symmetric = true;
  for (std::size_t i = 0; i < n && symmetric; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (costs[i * n + j] != costs[j * n + i]) {
        symmetric = false;
        break;
      }
    }
  }
  if (sup > 0.0) {
    for (double& v : costs) v /= sup;
  }
  return CostKernel(Explicit{n, std::move(costs), symmetric}, n, sup);
}

CostKernel CostKernel::grid(std::size_t width, std::size_t height, int p) {
  check_exponent(p);
  if (width == 0 || height == 0) throw std::invalid_argument("grid dimensions must be positive");
  // The farthest pair is a pair of opposite corners.
  const double sup = ipow(static_cast<double>(height - 1), p) + ipow(static_cast<double>(width - 1), p);
  return CostKernel(Grid{width, height, p}, width * height, sup);
}

CostKernel CostKernel::color(std::vector<std::array<double, 3>> features, int p) {
  check_exponent(p);
  if (features.empty()) throw std::invalid_argument("color kernel needs at least one feature");
  Color c{std::move(features), p};
  double sup = 0.0;
  for (std::size_t i = 0; i < c.features.size(); ++i) {
    for (std::size_t j = i + 1; j < c.features.size(); ++j) sup = std::max(sup, color_raw(c, i, j));
  }
  const std::size_t n = c.features.size();
  return CostKernel(std::move(c), n, sup);
}

bool CostKernel::symmetric() const {
  if (const auto* e = std::get_if<Explicit>(&impl_)) return e->symmetric;
  return true;
}

double CostKernel::operator()(std::size_t i, std::size_t j) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Explicit>) {
          return k.normalized[i * k.n + j];
        } else if constexpr (std::is_same_v<K, Grid>) {
          const double dr = std::abs(static_cast<double>(i / k.width) - static_cast<double>(j / k.width));
          const double dc = std::abs(static_cast<double>(i % k.width) - static_cast<double>(j % k.width));
          return (ipow(dr, k.p) + ipow(dc, k.p)) * inv_sup_;
        } else {
          return color_raw(k, i, j) * inv_sup_;
        }
      },
      impl_);
}

void CostKernel::row(std::size_t i, std::span<double> out) const {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Explicit>) {
          std::copy_n(k.normalized.begin() + static_cast<std::ptrdiff_t>(i * k.n), k.n, out.begin());
        } else if constexpr (std::is_same_v<K, Grid>) {
          const double ri = static_cast<double>(i / k.width);
          const double ci = static_cast<double>(i % k.width);
          std::size_t j = 0;
          for (std::size_t rr = 0; rr < k.height; ++rr) {
            const double row_term = ipow(std::abs(ri - static_cast<double>(rr)), k.p);
            for (std::size_t cc = 0; cc < k.width; ++cc, ++j) {
              out[j] = (row_term + ipow(std::abs(ci - static_cast<double>(cc)), k.p)) * inv_sup_;
            }
          }
        } else {
          for (std::size_t j = 0; j < n_; ++j) out[j] = color_raw(k, i, j) * inv_sup_;
        }
      },
      impl_);
}

void CostKernel::column(std::size_t j, std::span<double> out) const {
  if (symmetric()) {
    row(j, out);
    return;
  }
  const auto& k = std::get<Explicit>(impl_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = k.normalized[i * k.n + j];
}

DenseCoupling CostKernel::dense() const {
  DenseCoupling out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) row(i, out.row(i));
  return out;
}

}  // namespace dualot
