#pragma once

#include "trimfit/dataset.hpp"

namespace trimfit {

/// Direction-finding problem data: minimize tau over ||d|| <= radius subject
/// to b_a + g_a.d <= tau for every generator row g_a of G.
struct SubproblemInstance {
  Matrix G;       // m x n, rows are generator gradients
  Vector b;       // length m offsets
  double radius;  // trust-region radius, > 0
};

struct SubproblemSolution {
  double tau = 0.0;
  Vector direction;
  Vector multipliers;  // simplex weights over generators
  bool converged = true;
};

/// Solves the min-max over the ball through its dual: minimize
/// radius*||G^T lambda|| - b^T lambda over the probability simplex by
/// projected gradient on an epsilon-smoothed norm, then recovers
/// d = -radius * G^T lambda / ||G^T lambda|| and recomputes tau as the exact
/// primal max at d. Non-convergence within max_iter returns best-so-far with
/// converged = false.
SubproblemSolution solve_minmax_ball(const SubproblemInstance& inst,
                                     double tol = 1e-8, int max_iter = 5000);

/// Exhaustive grid minimizer of the primal over the ball (n <= 3), refined
/// once around the incumbent. Testing oracle.
SubproblemSolution brute_force_oracle(const SubproblemInstance& inst,
                                      int grid_points_per_axis);

/// Euclidean projection onto the probability simplex (sort-based).
Vector project_simplex(const Vector& v);

}  // namespace trimfit
