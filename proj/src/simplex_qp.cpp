#include "hmmar/simplex_qp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hmmar {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-10;
constexpr double kResidualTol = 1e-10;
constexpr std::size_t kMaxStates = 20;

std::vector<std::uint32_t> enumeration_order(std::size_t m) {
  std::vector<std::uint32_t> masks(std::size_t{1} << m);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) < std::popcount(b);
  });
  return masks;
}

void normalize_onto_simplex(Vector& u) {
  u = u.cwiseMax(0.0);
  u /= u.sum();
}

}  // namespace

double qp_objective(const QpProblem& p, const Vector& u) {
  return u.dot(p.quad * u) - 2.0 * p.lin.dot(u);
}

bool is_positive_definite(const Matrix& c) {
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) return false;
  const Vector pivots = Matrix(llt.matrixL()).diagonal().array().square();
  return pivots.minCoeff() > 1e-12;
}

Vector project_to_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cumsum += sorted[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

Vector projected_gradient_solve(const QpProblem& p, int max_iter, double tol) {
  const Eigen::Index m = p.lin.size();
  const double norm_inf = p.quad.cwiseAbs().rowwise().sum().maxCoeff();
  const double step = norm_inf > 0.0 ? 1.0 / (2.0 * norm_inf) : 1.0;
  Vector u = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (int it = 0; it < max_iter; ++it) {
    const Vector grad = 2.0 * (p.quad * u - p.lin);
    Vector next = project_to_simplex(u - step * grad);
    const double mapping_norm = (next - u).norm() / step;
    u = std::move(next);
    if (mapping_norm < tol) break;
  }
  return u;
}

QpSolution solve_kkt(const QpProblem& p) {
  const std::size_t m = p.size();
  if (m < 1) throw std::invalid_argument("QP must have at least one variable");
  if (m > kMaxStates) throw std::invalid_argument("KKT enumeration limited to 20 states");
  if (p.quad.rows() != p.lin.size() || p.quad.cols() != p.lin.size()) {
    throw std::invalid_argument("QP dimensions disagree");
  }
  const auto mi = static_cast<Eigen::Index>(m);

  Vector rhs(mi + 1);
  rhs.head(mi) = p.lin;
  rhs[mi] = 1.0;

  // Without convexity a KKT point need not be a minimizer: scan every
  // combination and keep the lowest objective.
  const bool convex = is_positive_definite(p.quad);
  std::optional<QpSolution> best;
  double best_value = std::numeric_limits<double>::infinity();

  Matrix reduced(mi + 1, mi + 1);
  for (std::uint32_t mask : enumeration_order(m)) {
    reduced.setZero();
    for (Eigen::Index i = 0; i < mi; ++i) {
      if (mask & (1u << i)) {
        reduced(i, i) = -1.0;  // column of lambda_i
      } else {
        reduced.col(i).head(mi) = p.quad.col(i);
        reduced(mi, i) = 1.0;
      }
    }
    reduced.col(mi).head(mi).setOnes();  // lambda_eq

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(reduced);
    const Vector rho = cod.solve(rhs);
    const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
    if (!rho.allFinite() || (reduced * rho - rhs).cwiseAbs().maxCoeff() > kResidualTol * scale) {
      continue;
    }

    bool feasible = true;
    for (Eigen::Index i = 0; i < mi && feasible; ++i) {
      const bool active = mask & (1u << i);
      feasible = active ? rho[i] >= -kDualTol : rho[i] >= -kPrimalTol;
    }
    if (!feasible) continue;

    QpSolution sol;
    sol.active_mask = mask;
    sol.u = Vector::Zero(mi);
    sol.lambda = Vector::Zero(mi);
    for (Eigen::Index i = 0; i < mi; ++i) {
      if (mask & (1u << i)) {
        sol.lambda[i] = std::max(rho[i], 0.0);
      } else {
        sol.u[i] = rho[i];
      }
    }
    sol.lambda_eq = rho[mi];
    normalize_onto_simplex(sol.u);
    if (convex) return sol;
    const double value = qp_objective(p, sol.u);
    if (!best || value < best_value - 1e-12 * (1.0 + std::abs(best_value))) {
      best_value = value;
      best = std::move(sol);
    }
  }
  if (best) return *best;

  QpSolution sol;
  sol.fallback = true;
  sol.u = projected_gradient_solve(p);
  normalize_onto_simplex(sol.u);
  // Multipliers recovered from the gradient on the support.
  const Vector g = p.quad * sol.u - p.lin;
  double eq = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < mi; ++i) {
    if (sol.u[i] > 0.0) {
      eq -= g[i];
      ++support;
    }
  }
  sol.lambda_eq = support > 0 ? eq / support : 0.0;
  sol.lambda = (g.array() + sol.lambda_eq).matrix();
  for (Eigen::Index i = 0; i < mi; ++i) {
    if (sol.u[i] > 0.0) sol.lambda[i] = 0.0;
    else sol.active_mask |= (1u << i);
  }
  return sol;
}

Vector brute_force_solve(const QpProblem& p, double step) {
  if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must be in (0, 0.5]");
  const std::size_t m = p.size();
  const auto mi = static_cast<Eigen::Index>(m);
  const long units = std::lround(1.0 / step);
  const double unit = 1.0 / static_cast<double>(units);

  if (m == 1) return Vector::Ones(1);

  std::vector<long> counts(m, 0);
  std::vector<long> best_counts(m, 0);
  double best = std::numeric_limits<double>::infinity();

  // Partial sums for coordinates fixed so far: cu = C u, quad = u'Cu, lin = c'u.
  std::vector<Vector> cu(m, Vector::Zero(mi));
  std::vector<double> quad(m, 0.0);
  std::vector<double> lin(m, 0.0);

  const auto last = mi - 1;
  std::function<void(std::size_t, long)> descend = [&](std::size_t k, long remaining) {
    const auto ki = static_cast<Eigen::Index>(k);
    if (ki == last) {
      const double v = static_cast<double>(remaining) * unit;
      const double f = quad[k] + 2.0 * v * cu[k][ki] + p.quad(ki, ki) * v * v -
                       2.0 * (lin[k] + p.lin[ki] * v);
      if (f < best) {
        best = f;
        counts[k] = remaining;
        best_counts = counts;
      }
      return;
    }
    for (long c = 0; c <= remaining; ++c) {
      const double v = static_cast<double>(c) * unit;
      counts[k] = c;
      quad[k + 1] = quad[k] + 2.0 * v * cu[k][ki] + p.quad(ki, ki) * v * v;
      lin[k + 1] = lin[k] + p.lin[ki] * v;
      cu[k + 1] = cu[k] + v * p.quad.col(ki);
      descend(k + 1, remaining - c);
    }
  };
  descend(0, units);

  Vector u(mi);
  for (Eigen::Index i = 0; i < mi; ++i) u[i] = static_cast<double>(best_counts[i]) * unit;
  return u;
}

}  // namespace hmmar
