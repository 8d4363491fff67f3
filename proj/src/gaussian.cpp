#include "hmmar/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hmmar {

double normal_pdf(double x, const Gaussian1& g) {
  const double d = x - g.mean;
  return std::exp(-d * d / (2.0 * g.var)) / std::sqrt(2.0 * std::numbers::pi * g.var);
}

double log_normal_pdf(double x, const Gaussian1& g) {
  const double d = x - g.mean;
  return -d * d / (2.0 * g.var) - 0.5 * std::log(2.0 * std::numbers::pi * g.var);
}

double product_integral(const Gaussian1& g1, const Gaussian1& g2) {
  return normal_pdf(g1.mean, Gaussian1{g2.mean, g1.var + g2.var});
}

Gaussian1 emission_gaussian(const ArStateParams& params, std::span<const double> history) {
  if (history.size() != params.order()) {
    throw std::invalid_argument("emission history length differs from AR order");
  }
  double mean = params.mu;
  for (std::size_t i = 0; i < history.size(); ++i) {
    mean += params.a[static_cast<Eigen::Index>(i)] * (history[i] - params.mu);
  }
  return {mean, params.b * params.b};
}

double emission_density(double x, std::span<const double> history, const ArStateParams& params) {
  return normal_pdf(x, emission_gaussian(params, history));
}

double log_emission_density(double x, std::span<const double> history,
                            const ArStateParams& params) {
  return log_normal_pdf(x, emission_gaussian(params, history));
}

}  // namespace hmmar
