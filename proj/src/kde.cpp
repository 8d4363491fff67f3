#include "hmmar/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hmmar {

namespace {

constexpr double kBracketFloor = 1e-6;
constexpr int kCoarseGridPoints = 32;
constexpr double kGoldenTol = 1e-4;
constexpr int kGoldenMaxIter = 200;

}  // namespace

EmbeddedSample EmbeddedSample::build(std::span<const double> x, std::size_t dim,
                                     std::size_t stride) {
  if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  if (stride == 0) throw std::invalid_argument("embedding stride must be positive");
  if (x.size() < dim) throw std::invalid_argument("series shorter than embedding dimension");
  EmbeddedSample out;
  out.dim_ = dim;
  out.stride_ = stride;
  out.n_ = 1 + (x.size() - dim) / stride;
  out.data_.resize(out.n_ * dim);
  for (std::size_t i = 0; i < out.n_; ++i) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * stride), dim,
                out.data_.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  return out;
}

EmbeddedSample EmbeddedSample::from_points(std::vector<double> rows, std::size_t dim) {
  if (dim == 0 || rows.size() % dim != 0) {
    throw std::invalid_argument("point data does not match dimension");
  }
  EmbeddedSample out;
  out.dim_ = dim;
  out.n_ = rows.size() / dim;
  out.data_ = std::move(rows);
  return out;
}

Bandwidth::Bandwidth(double h) : h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("bandwidth must be positive");
}

double kde_eval(const EmbeddedSample& sample, Bandwidth bw, std::span<const double> y) {
  const std::size_t d = sample.dim();
  if (y.size() != d) throw std::invalid_argument("evaluation point has wrong dimension");
  const double h = bw.value();
  double sum = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto yi = sample.point(i);
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = y[k] - yi[k];
      r2 += diff * diff;
    }
    sum += std::exp(-r2 / (2.0 * h * h));
  }
  const double norm = static_cast<double>(sample.size()) *
                      std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)) *
                      std::pow(h, static_cast<double>(d));
  return sum / norm;
}

UcvObjective::UcvObjective(const EmbeddedSample& sample)
    : n_(sample.size()), dim_(sample.dim()) {
  if (n_ < 2) throw std::invalid_argument("UCV needs at least two points");
  sq_dist_.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto yi = sample.point(i);
    for (std::size_t j = i + 1; j < n_; ++j) {
      const auto yj = sample.point(j);
      double r2 = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) {
        const double diff = yi[k] - yj[k];
        r2 += diff * diff;
      }
      sq_dist_.push_back(r2);
    }
  }
}

double UcvObjective::operator()(double h) const {
  const double d = static_cast<double>(dim_);
  const double n = static_cast<double>(n_);
  const double h2 = h * h;
  const double conv_scale = std::pow(2.0, -0.5 * d);
  double pair_sum = 0.0;
  for (double r2 : sq_dist_) {
    pair_sum += conv_scale * std::exp(-r2 / (4.0 * h2)) - 2.0 * std::exp(-r2 / (2.0 * h2));
  }
  pair_sum *= 2.0;  // ordered pairs i != j
  const double hd = std::pow(h, d);
  return pair_sum / (n * (n - 1.0) * std::pow(2.0 * std::numbers::pi, 0.5 * d) * hd) +
         1.0 / (n * std::pow(4.0 * std::numbers::pi, 0.5 * d) * hd);
}

double ucv_objective(const EmbeddedSample& sample, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("UCV bandwidth must be positive");
  return UcvObjective(sample)(h);
}

double oversmoothed_bandwidth(const EmbeddedSample& sample) {
  const std::size_t n = sample.size();
  const std::size_t d = sample.dim();
  if (n < 2) throw std::invalid_argument("oversmoothed bandwidth needs at least two points");
  double max_sd = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += sample.point(i)[k];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = sample.point(i)[k] - mean;
      ss += diff * diff;
    }
    max_sd = std::max(max_sd, std::sqrt(ss / static_cast<double>(n - 1)));
  }
  if (!(max_sd > 0.0)) throw std::domain_error("sample is constant in every coordinate");
  const double dd = static_cast<double>(d);
  return std::pow(4.0 / (static_cast<double>(n) * (dd + 2.0)), 1.0 / (dd + 4.0)) * max_sd;
}

Bandwidth ucv_bandwidth(const EmbeddedSample& sample) {
  const double h_plus = oversmoothed_bandwidth(sample);
  const UcvObjective ucv(sample);

  const double lo = kBracketFloor * h_plus;
  std::vector<double> grid(kCoarseGridPoints);
  std::vector<double> values(kCoarseGridPoints);
  const double log_step = std::log(h_plus / lo) / (kCoarseGridPoints - 1);
  for (int k = 0; k < kCoarseGridPoints; ++k) {
    grid[k] = (k == kCoarseGridPoints - 1) ? h_plus : lo * std::exp(log_step * k);
    values[k] = ucv(grid[k]);
  }
  const auto best = static_cast<int>(std::min_element(values.begin(), values.end()) -
                                     values.begin());

  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kCoarseGridPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double e = a + inv_phi * (b - a);
  double fc = ucv(c);
  double fe = ucv(e);
  for (int it = 0; it < kGoldenMaxIter && (b - a) > kGoldenTol * h_plus; ++it) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - inv_phi * (b - a);
      fc = ucv(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + inv_phi * (b - a);
      fe = ucv(e);
    }
  }
  const double mid = 0.5 * (a + b);
  double h_best = grid[best];
  double f_best = values[best];
  for (auto [h, f] : {std::pair{c, fc}, std::pair{e, fe}, std::pair{mid, ucv(mid)}}) {
    if (f < f_best) {
      h_best = h;
      f_best = f;
    }
  }
  return Bandwidth(h_best);
}

std::size_t conditional_sample_size(std::size_t n, std::size_t tau, std::size_t stride) {
  const std::size_t d = tau + 1;
  if (stride == 0) throw std::invalid_argument("stride must be positive");
  if (n < 1 + d) throw std::invalid_argument("insufficient history for conditional weights");
  return 1 + (n - 1 - d) / stride;
}

Vector conditional_weights(std::span<const double> x, std::size_t n, std::size_t tau,
                           std::size_t stride, double h) {
  if (tau == 0) throw std::invalid_argument("tau must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const std::size_t count = conditional_sample_size(n, tau, stride);
  if (x.size() < n - 1) throw std::invalid_argument("series shorter than n - 1");

  // 0-based: query window is x[n-1-tau .. n-2], candidate i starts at i*stride.
  const std::size_t query = n - 1 - tau;
  Vector log_w(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * stride;
    double r2 = 0.0;
    for (std::size_t j = 0; j < tau; ++j) {
      const double diff = x[query + j] - x[start + j];
      r2 += diff * diff;
    }
    log_w[static_cast<Eigen::Index>(i)] = -r2 / (2.0 * h * h);
  }
  const double top = log_w.maxCoeff();
  Vector w = (log_w.array() - top).exp().matrix();
  return w / w.sum();
}

}  // namespace hmmar
