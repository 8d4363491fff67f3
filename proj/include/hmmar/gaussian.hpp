#pragma once

#include <span>

#include "hmmar/model.hpp"

namespace hmmar {

/// Univariate normal law N(mean, var).
struct Gaussian1 {
  double mean = 0.0;
  double var = 1.0;
};

double normal_pdf(double x, const Gaussian1& g);
double log_normal_pdf(double x, const Gaussian1& g);

/// Integral over the real line of the product of two normal densities,
/// which equals phi(g1.mean; g2.mean, g1.var + g2.var).
double product_integral(const Gaussian1& g1, const Gaussian1& g2);

/// Conditional law of X_n in a given state. `history` holds
/// x_{n-1}, x_{n-2}, ..., x_{n-p} in that order.
Gaussian1 emission_gaussian(const ArStateParams& params, std::span<const double> history);

double emission_density(double x, std::span<const double> history, const ArStateParams& params);
double log_emission_density(double x, std::span<const double> history,
                            const ArStateParams& params);

}  // namespace hmmar
