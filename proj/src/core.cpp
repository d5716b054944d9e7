#include "dualot/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dualot {

Histogram::Histogram(std::vector<double> weights) : weights_(std::move(weights)) {
  double sum = 0.0;
  bool positive = !weights_.empty();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("histogram entry " + std::to_string(i) +
                                  " is negative or not finite");
    }
    positive = positive && w > 0.0;
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("histogram does not sum to 1 (sum = " +
                                std::to_string(sum) + ")");
  }
  full_support_ = positive;
}

Histogram Histogram::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("histogram weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("histogram has zero total mass");
  for (double& w : weights) w /= sum;
  // A second pass pulls the rounding error of the division back under tolerance.
  const double resum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(resum - 1.0) > Histogram::kSumTolerance) {
    for (double& w : weights) w /= resum;
  }
  return Histogram(std::move(weights));
}

Histogram Histogram::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform histogram needs n > 0");
  return Histogram::normalized(std::vector<double>(n, 1.0));
}

double Histogram::min() const {
  if (weights_.empty()) return 0.0;
  return *std::min_element(weights_.begin(), weights_.end());
}

std::vector<double> DenseCoupling::row_marginal() const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    out[i] = std::accumulate(r.begin(), r.end(), 0.0);
  }
  return out;
}

std::vector<double> DenseCoupling::col_marginal() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    auto r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) out[j] += r[j];
  }
  return out;
}

double DenseCoupling::total() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

double lse(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("lse of an empty sequence");
  const double hi = *std::max_element(values.begin(), values.end());
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

double kl_divergence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0.0) continue;
    if (!(b[i] > 0.0)) {
      throw std::domain_error("kl_divergence: a is not absolutely continuous w.r.t. b");
    }
    out += a[i] * (std::log(a[i]) - std::log(b[i]));
  }
  return out;
}

double entropy(std::span<const double> x) {
  double out = 0.0;
  for (double v : x) {
    if (v > 0.0) out -= v * std::log(v);
  }
  return out;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: size mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out += std::abs(a[i] - b[i]);
  return out;
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_distance: size mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace dualot
