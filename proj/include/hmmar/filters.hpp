#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hmmar/model.hpp"
#include "hmmar/simplex_qp.hpp"

namespace hmmar {

/// predictive = P(S_n = . | x_1^{n-1}), posterior = P(S_n = . | x_1^n).
struct FilterState {
  Vector predictive;
  Vector posterior;
  std::size_t n = 0;
};

/// 0-based state decisions: argmax of posterior (filtering) and of
/// predictive (one-step prediction).
struct EstimatorOutput {
  int filtered_state = 0;
  int predicted_state = 0;
};

/// First index of the largest entry.
int argmax_state(const Vector& probs);

EstimatorOutput decide(const FilterState& state);

/// log f_m(x_n) for every state m. `history` is x_{n-1}, ..., x_{n-p}.
Vector log_emissions(double x_n, std::span<const double> history,
                     std::span<const ArStateParams> states);

/// Bayes update of a predictive vector with the emission likelihoods,
/// normalized by the mixture sum_m f_m(x_n) u(m). Works in log space.
Vector posterior_update(const Vector& predictive, const Vector& log_emission);

/// One step of the filter with known transition matrix: propagate the
/// previous posterior through the chain, then condition on x_n.
FilterState optimal_step(const FilterState& previous, double x_n, std::span<const double> history,
                         const SwitchingArModel& model);

/// Coefficients of the L2 projection of the kernel conditional density of
/// x_n onto mixtures of the state emission densities. `x` holds x_1..x_n
/// (only x_1..x_{n-1} are read); `n` is 1-based.
QpProblem projection_problem(std::span<const double> x, std::size_t n,
                             std::span<const ArStateParams> states, std::size_t tau,
                             std::size_t stride, double h);

struct NonparametricStep {
  FilterState state;
  bool qp_fallback = false;
};

/// Filter step with unknown transition matrix: the predictive vector is the
/// simplex-constrained L2 projection, the posterior follows by Bayes' rule.
/// Requires n > max(p, tau + 1).
NonparametricStep nonparametric_step(std::span<const double> x, std::size_t n,
                                     std::span<const ArStateParams> states, std::size_t tau,
                                     std::size_t stride, double h);

/// Last index (1-based) for which the nonparametric filter uses a uniform
/// predictive instead of the projection.
std::size_t nonparametric_warmup(std::size_t ar_order, std::size_t tau);

struct RunConfig {
  std::size_t tau = 2;
  std::size_t stride = 1;
  std::size_t eval_start = 1;  // first 1-based index recorded
  bool nonparametric = true;
  std::optional<double> bandwidth;  // selected by UCV when absent
};

struct StepRecord {
  std::size_t n = 0;
  FilterState optimal;
  EstimatorOutput optimal_decision;
  std::optional<FilterState> nonparametric;
  std::optional<EstimatorOutput> nonparametric_decision;
  bool qp_fallback = false;
};

struct FilterRun {
  std::vector<StepRecord> records;
  std::optional<double> bandwidth;
  std::size_t qp_fallbacks = 0;
};

/// Runs both filters over a trajectory and records steps from eval_start on.
/// The optimal filter starts from the stationary law at n = p; the
/// nonparametric bandwidth is selected once by UCV on the (tau+1)-dimensional
/// embedding of the whole series unless provided.
FilterRun run_filters(const Trajectory& trajectory, const SwitchingArModel& model,
                      const RunConfig& config);

}  // namespace hmmar
