#pragma once

#include <cstdint>

#include "hmmar/model.hpp"

namespace hmmar {

/// min_u  u' C u - 2 c' u  over the probability simplex.
struct QpProblem {
  Matrix quad;  // symmetric C
  Vector lin;   // c

  std::size_t size() const { return static_cast<std::size_t>(lin.size()); }
};

/// Minimizer with its KKT multipliers. With the objective scaled by 1/2,
/// stationarity reads (C u - c)_i - lambda_i + lambda_eq = 0.
struct QpSolution {
  Vector u;
  Vector lambda;           // one per nonnegativity constraint
  double lambda_eq = 0.0;  // equality constraint sum(u) = 1
  std::uint32_t active_mask = 0;  // bit i set: u_i fixed at zero
  bool fallback = false;          // projected gradient was used
};

double qp_objective(const QpProblem& p, const Vector& u);

/// Enumerates the 2^M choices of which member of each (u_i, lambda_i) pair
/// vanishes, in order of increasing active-set size (then increasing mask),
/// solving the reduced (M+1)x(M+1) KKT system for each. Returns the first
/// primal and dual feasible point; when C is not positive definite every
/// feasible KKT point is examined and the lowest objective wins. Rank-deficient reduced systems are solved
/// in the minimum-norm sense when consistent. If no combination is
/// feasible, projected gradient descent is used and `fallback` is set.
/// Practical for M up to about 20.
QpSolution solve_kkt(const QpProblem& p);

/// Exhaustive search over {u in simplex : u_i multiple of 1/K}, with
/// K = round(1/step). Ties go to the lexicographically smallest u.
Vector brute_force_solve(const QpProblem& p, double step);

/// Cholesky succeeds with every pivot above 1e-12.
bool is_positive_definite(const Matrix& c);

/// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

/// Projected gradient descent with step 1 / (2 ||C||_inf).
Vector projected_gradient_solve(const QpProblem& p, int max_iter = 10000, double tol = 1e-10);

}  // namespace hmmar
