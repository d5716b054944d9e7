#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dualot {

/// A probability mass function over n points.
///
/// Entries are nonnegative and sum to one within `kSumTolerance`. The
/// `full_support()` flag records whether every entry is strictly positive;
/// solvers that take logarithms of marginals check it on entry.
class Histogram {
 public:
  static constexpr double kSumTolerance = 1e-12;

  Histogram() = default;

  /// Validates `weights` as given. Throws std::invalid_argument on negative
  /// entries, non-finite entries, or a sum outside tolerance.
  explicit Histogram(std::vector<double> weights);

  /// Rescales nonnegative `weights` to unit mass. Throws when the total is 0.
  static Histogram normalized(std::vector<double> weights);

  /// The uniform histogram over n points.
  static Histogram uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }
  bool full_support() const { return full_support_; }
  double min() const;

 private:
  std::vector<double> weights_;
  bool full_support_ = false;
};

/// Row-major n x m nonnegative matrix. Used for explicit plans at small n.
class DenseCoupling {
 public:
  DenseCoupling() = default;
  DenseCoupling(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::vector<double> row_marginal() const;
  std::vector<double> col_marginal() const;
  double total() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// log(sum(exp(v))) with max subtraction. Entries may be -inf; returns -inf
/// when every entry is -inf. Throws std::invalid_argument on empty input.
double lse(std::span<const double> values);

/// <a, log a - log b> with 0 log 0 = 0. Throws std::domain_error when some
/// a_i > 0 has b_i <= 0.
double kl_divergence(std::span<const double> a, std::span<const double> b);

/// -sum x log x over all entries, 0 log 0 = 0.
double entropy(std::span<const double> x);

double l1_distance(std::span<const double> a, std::span<const double> b);
double linf_distance(std::span<const double> a, std::span<const double> b);

/// Logistic map 1 / (1 + exp(-x)), evaluated without overflow.
double logistic(double x);

}  // namespace dualot
