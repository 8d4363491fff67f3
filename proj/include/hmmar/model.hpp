#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hmmar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row-stochastic transition matrix, entry (i, j) = Pr(S_n = j | S_{n-1} = i).
///
/// Construction validates entries in [0, 1] and row sums within 1e-12.
/// A 1x1 matrix is accepted for degenerate single-state experiments; the
/// configuration loader requires at least two states.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix p);

  std::size_t num_states() const { return static_cast<std::size_t>(p_.rows()); }
  double operator()(std::size_t from, std::size_t to) const { return p_(from, to); }
  const Matrix& matrix() const { return p_; }

 private:
  Matrix p_;
};

/// Coefficients of the AR(p) law active in one hidden state:
/// X_n = mu + sum_i a_i (X_{n-i} - mu) + b * xi_n.
struct ArStateParams {
  double mu = 0.0;
  Vector a;
  double b = 1.0;

  std::size_t order() const { return static_cast<std::size_t>(a.size()); }
};

class SwitchingArModel {
 public:
  /// Without an explicit initial distribution, S_1 is drawn from the
  /// stationary distribution of the chain.
  SwitchingArModel(TransitionMatrix transition, std::vector<ArStateParams> states,
                   std::optional<Vector> initial_dist = std::nullopt);

  const TransitionMatrix& transition() const { return transition_; }
  const std::vector<ArStateParams>& states() const { return states_; }
  const ArStateParams& state(std::size_t m) const { return states_[m]; }
  const Vector& initial_dist() const { return initial_dist_; }
  std::size_t num_states() const { return states_.size(); }
  std::size_t ar_order() const { return states_.front().order(); }

 private:
  TransitionMatrix transition_;
  std::vector<ArStateParams> states_;
  Vector initial_dist_;
};

/// Simulated path. States are stored 0-based; files and user-facing output
/// report them 1-based.
struct Trajectory {
  std::vector<int> s;
  std::vector<double> x;

  std::size_t size() const { return x.size(); }
};

/// Stationary law of an irreducible chain by power iteration.
/// Throws std::domain_error for reducible chains or when the iteration
/// cap is hit (periodic chains that oscillate).
Vector stationary_distribution(const TransitionMatrix& t);

/// Generates burn_in + n steps and keeps the last n. The p pre-sample
/// observations are set to mu(S_1). Equal seeds give identical output.
Trajectory simulate(const SwitchingArModel& model, std::size_t n, std::size_t burn_in,
                    std::uint64_t seed);

}  // namespace hmmar
