#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hmmar/model.hpp"

namespace hmmar {

/// Delay embedding of a scalar series: point i (0-based) is
/// (x[i*stride], x[i*stride + 1], ..., x[i*stride + dim - 1]).
class EmbeddedSample {
 public:
  /// Throws std::invalid_argument when the series is shorter than `dim`.
  static EmbeddedSample build(std::span<const double> x, std::size_t dim, std::size_t stride);

  /// Wraps already-formed points stored row-major (size() * dim values).
  static EmbeddedSample from_points(std::vector<double> rows, std::size_t dim);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride() const { return stride_; }
  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::vector<double> data_;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::size_t stride_ = 1;
};

/// Scalar bandwidth h; the kernel covariance is h^2 * I.
class Bandwidth {
 public:
  explicit Bandwidth(double h);
  double value() const { return h_; }

 private:
  double h_;
};

/// Normal product-kernel density estimate at y.
double kde_eval(const EmbeddedSample& sample, Bandwidth bw, std::span<const double> y);

/// Unbiased cross-validation score for the normal kernel with H = h^2 I.
/// Holds the pairwise squared distances so repeated evaluations cost O(N^2)
/// exponentials and no distance recomputation.
class UcvObjective {
 public:
  explicit UcvObjective(const EmbeddedSample& sample);
  double operator()(double h) const;

 private:
  std::vector<double> sq_dist_;  // i < j pairs
  std::size_t n_;
  std::size_t dim_;
};

double ucv_objective(const EmbeddedSample& sample, double h);

/// Oversmoothed bandwidth (4 / (N (d + 2)))^{1/(d+4)} * max_k sd_k.
/// Throws std::domain_error when every coordinate is constant.
double oversmoothed_bandwidth(const EmbeddedSample& sample);

/// Minimizes UCV on [1e-6 h+, h+]: a 32-point log grid picks a sub-bracket,
/// then golden-section search refines it to 1e-4 h+.
Bandwidth ucv_bandwidth(const EmbeddedSample& sample);

/// Weights beta_i of the conditional kernel estimate of x_n given the
/// previous `tau` values. `x` must hold at least x_1..x_{n-1}; `n` is
/// 1-based. Candidate window i covers x_{(i-1)l+1..(i-1)l+tau} and the
/// number of candidates is 1 + floor((n - 1 - (tau + 1)) / l).
Vector conditional_weights(std::span<const double> x, std::size_t n, std::size_t tau,
                           std::size_t stride, double h);

/// Number of candidate windows used by conditional_weights at index n.
std::size_t conditional_sample_size(std::size_t n, std::size_t tau, std::size_t stride);

}  // namespace hmmar
