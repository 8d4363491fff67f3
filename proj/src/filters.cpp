#include "hmmar/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmmar/gaussian.hpp"
#include "hmmar/kde.hpp"

namespace hmmar {

namespace {

constexpr std::size_t kWarmupMargin = 20;

// x_{n-1}, ..., x_{n-p} for 1-based n.
std::vector<double> history_at(std::span<const double> x, std::size_t n, std::size_t p) {
  std::vector<double> h(p);
  for (std::size_t i = 0; i < p; ++i) h[i] = x[n - 2 - i];
  return h;
}

}  // namespace

int argmax_state(const Vector& probs) {
  int best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = static_cast<int>(i);
  }
  return best;
}

EstimatorOutput decide(const FilterState& state) {
  return {argmax_state(state.posterior), argmax_state(state.predictive)};
}

Vector log_emissions(double x_n, std::span<const double> history,
                     std::span<const ArStateParams> states) {
  Vector out(static_cast<Eigen::Index>(states.size()));
  for (std::size_t m = 0; m < states.size(); ++m) {
    out[static_cast<Eigen::Index>(m)] = log_emission_density(x_n, history, states[m]);
  }
  return out;
}

Vector posterior_update(const Vector& predictive, const Vector& log_emission) {
  const Eigen::Index m = predictive.size();
  Vector log_joint(m);
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    log_joint[i] = predictive[i] > 0.0 ? std::log(predictive[i]) + log_emission[i]
                                       : -std::numeric_limits<double>::infinity();
    top = std::max(top, log_joint[i]);
  }
  if (!std::isfinite(top)) throw std::domain_error("posterior update: zero mixture likelihood");
  Vector post(m);
  for (Eigen::Index i = 0; i < m; ++i) post[i] = std::exp(log_joint[i] - top);
  return post / post.sum();
}

FilterState optimal_step(const FilterState& previous, double x_n, std::span<const double> history,
                         const SwitchingArModel& model) {
  FilterState next;
  next.n = previous.n + 1;
  next.predictive = model.transition().matrix().transpose() * previous.posterior;
  next.predictive /= next.predictive.sum();
  next.posterior = posterior_update(next.predictive, log_emissions(x_n, history, model.states()));
  return next;
}

QpProblem projection_problem(std::span<const double> x, std::size_t n,
                             std::span<const ArStateParams> states, std::size_t tau,
                             std::size_t stride, double h) {
  const std::size_t m = states.size();
  const std::size_t p = states.front().order();
  const auto mi = static_cast<Eigen::Index>(m);
  if (n <= std::max(p, tau + 1)) throw std::invalid_argument("insufficient history");

  const std::vector<double> hist = history_at(x, n, p);
  std::vector<Gaussian1> emission(m);
  for (std::size_t k = 0; k < m; ++k) emission[k] = emission_gaussian(states[k], hist);

  QpProblem qp;
  qp.quad.resize(mi, mi);
  for (Eigen::Index i = 0; i < mi; ++i) {
    for (Eigen::Index j = i; j < mi; ++j) {
      const double v = product_integral(emission[i], emission[j]);
      qp.quad(i, j) = v;
      qp.quad(j, i) = v;
    }
  }

  const Vector beta = conditional_weights(x, n, tau, stride, h);
  qp.lin = Vector::Zero(mi);
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    // Value following candidate window i: x_{(i-1)l + tau + 1} in 1-based terms.
    const Gaussian1 kernel{x[static_cast<std::size_t>(i) * stride + tau], h * h};
    for (Eigen::Index k = 0; k < mi; ++k) {
      qp.lin[k] += beta[i] * product_integral(kernel, emission[k]);
    }
  }
  return qp;
}

NonparametricStep nonparametric_step(std::span<const double> x, std::size_t n,
                                     std::span<const ArStateParams> states, std::size_t tau,
                                     std::size_t stride, double h) {
  const std::size_t p = states.front().order();
  if (n <= std::max(p, tau + 1) || x.size() < n) {
    throw std::invalid_argument("nonparametric step: insufficient history");
  }
  NonparametricStep out;
  out.state.n = n;
  if (states.size() == 1) {
    out.state.predictive = Vector::Ones(1);
  } else {
    const QpSolution sol = solve_kkt(projection_problem(x, n, states, tau, stride, h));
    out.state.predictive = sol.u;
    out.qp_fallback = sol.fallback;
  }
  out.state.posterior =
      posterior_update(out.state.predictive, log_emissions(x[n - 1], history_at(x, n, p), states));
  return out;
}

std::size_t nonparametric_warmup(std::size_t ar_order, std::size_t tau) {
  return std::max(ar_order, tau + 1) + kWarmupMargin;
}

FilterRun run_filters(const Trajectory& trajectory, const SwitchingArModel& model,
                      const RunConfig& config) {
  const std::span<const double> x(trajectory.x);
  const std::size_t total = x.size();
  const std::size_t p = model.ar_order();
  const std::size_t m = model.num_states();
  const auto mi = static_cast<Eigen::Index>(m);

  FilterRun run;
  if (config.eval_start > total) return run;

  if (config.nonparametric) {
    if (config.bandwidth) {
      run.bandwidth = Bandwidth(*config.bandwidth).value();
    } else {
      run.bandwidth = ucv_bandwidth(EmbeddedSample::build(x, config.tau + 1, config.stride)).value();
    }
  }
  const std::size_t warmup = nonparametric_warmup(p, config.tau);
  const Vector uniform = Vector::Constant(mi, 1.0 / static_cast<double>(m));
  const Vector prior = stationary_distribution(model.transition());

  FilterState optimal{prior, prior, 0};
  for (std::size_t n = 1; n <= total; ++n) {
    std::vector<double> hist;
    if (n > p) {
      hist = history_at(x, n, p);
      optimal = optimal_step(optimal, x[n - 1], hist, model);
    } else {
      optimal.n = n;
    }

    if (n < config.eval_start) continue;

    // The nonparametric estimate carries no state between steps, so only
    // recorded indices are computed.
    StepRecord rec;
    if (config.nonparametric) {
      FilterState np;
      if (n <= warmup) {
        np.n = n;
        np.predictive = uniform;
        np.posterior = n > p ? posterior_update(uniform, log_emissions(x[n - 1], hist, model.states()))
                             : uniform;
      } else {
        NonparametricStep step =
            nonparametric_step(x, n, model.states(), config.tau, config.stride, *run.bandwidth);
        np = std::move(step.state);
        rec.qp_fallback = step.qp_fallback;
        if (step.qp_fallback) ++run.qp_fallbacks;
      }
      rec.nonparametric_decision = decide(np);
      rec.nonparametric = std::move(np);
    }
    rec.n = n;
    rec.optimal = optimal;
    rec.optimal_decision = decide(optimal);
    run.records.push_back(std::move(rec));
  }
  return run;
}

}  // namespace hmmar
