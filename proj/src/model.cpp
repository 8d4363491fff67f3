#include "hmmar/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hmmar/rng.hpp"

namespace hmmar {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr int kPowerIterationCap = 100000;
constexpr double kPowerIterationTol = 1e-15;

void check_probability_vector(const Vector& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
      throw std::invalid_argument(std::string(what) + ": entry outside [0, 1]");
    }
  }
  if (std::abs(v.sum() - 1.0) > kRowSumTol) {
    throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
  }
}

// Every state reaches every other state along positive-probability edges.
bool strongly_connected(const Matrix& p) {
  const Eigen::Index m = p.rows();
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(m, 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Eigen::Index i = stack.back();
      stack.pop_back();
      for (Eigen::Index j = 0; j < m; ++j) {
        const double w = transpose ? p(j, i) : p(i, j);
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    for (char s : seen) {
      if (!s) return false;
    }
    return true;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix p) : p_(std::move(p)) {
  if (p_.rows() < 1 || p_.rows() != p_.cols()) {
    throw std::invalid_argument("transition matrix must be square and non-empty");
  }
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    check_probability_vector(p_.row(i).transpose(),
                             ("transition row " + std::to_string(i + 1)).c_str());
  }
}

SwitchingArModel::SwitchingArModel(TransitionMatrix transition,
                                   std::vector<ArStateParams> states,
                                   std::optional<Vector> initial_dist)
    : transition_(std::move(transition)), states_(std::move(states)) {
  if (states_.size() != transition_.num_states()) {
    throw std::invalid_argument("number of AR states does not match transition matrix");
  }
  const std::size_t p = states_.front().order();
  for (const auto& st : states_) {
    if (st.order() != p) {
      throw std::invalid_argument("all states must share the same AR order");
    }
    if (!(st.b > 0.0) || !std::isfinite(st.b)) {
      throw std::invalid_argument("noise scale b must be positive");
    }
  }
  if (initial_dist) {
    if (static_cast<std::size_t>(initial_dist->size()) != states_.size()) {
      throw std::invalid_argument("initial_dist has wrong length");
    }
    check_probability_vector(*initial_dist, "initial_dist");
    initial_dist_ = *initial_dist;
  } else {
    initial_dist_ = stationary_distribution(transition_);
  }
}

Vector stationary_distribution(const TransitionMatrix& t) {
  const Matrix& p = t.matrix();
  if (!strongly_connected(p)) {
    throw std::domain_error("transition matrix is reducible; stationary law is not unique");
  }
  const Eigen::Index m = p.rows();
  Vector pi = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < kPowerIterationCap; ++it) {
    Vector next = p.transpose() * pi;
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = std::move(next);
    if (delta < kPowerIterationTol) return pi;
  }
  throw std::domain_error("power iteration did not converge; chain may be periodic");
}

Trajectory simulate(const SwitchingArModel& model, std::size_t n, std::size_t burn_in,
                    std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");

  const StreamSeeds seeds = split_streams(seed);
  Engine chain_rng(seeds.chain);
  Engine noise_rng(seeds.noise);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const std::size_t m = model.num_states();
  const std::size_t p = model.ar_order();
  const Vector& init = model.initial_dist();
  std::discrete_distribution<int> first(init.data(), init.data() + init.size());
  std::vector<std::discrete_distribution<int>> rows;
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector row = model.transition().matrix().row(static_cast<Eigen::Index>(i));
    rows.emplace_back(row.data(), row.data() + row.size());
  }

  const std::size_t total = burn_in + n;
  int state = first(chain_rng);
  // Pre-sample block followed by the generated path.
  std::vector<double> x(p + total, model.state(static_cast<std::size_t>(state)).mu);
  std::vector<int> s(total);

  for (std::size_t t = 0; t < total; ++t) {
    if (t > 0) state = rows[static_cast<std::size_t>(state)](chain_rng);
    const ArStateParams& par = model.state(static_cast<std::size_t>(state));
    double value = par.mu;
    for (std::size_t i = 0; i < p; ++i) {
      value += par.a[static_cast<Eigen::Index>(i)] * (x[p + t - 1 - i] - par.mu);
    }
    value += par.b * gauss(noise_rng);
    x[p + t] = value;
    s[t] = state;
  }

  Trajectory out;
  out.s.assign(s.begin() + static_cast<std::ptrdiff_t>(burn_in), s.end());
  out.x.assign(x.begin() + static_cast<std::ptrdiff_t>(p + burn_in), x.end());
  return out;
}

}  // namespace hmmar
