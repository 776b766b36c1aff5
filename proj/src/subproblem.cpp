#include "trimfit/subproblem.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace trimfit {

Vector project_simplex(const Vector& v) {
  const int m = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < m; ++i) {
    cssv += u[i];
    double t = (cssv - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  return (v.array() - theta).cwiseMax(0.0);
}

namespace {

constexpr double kNormEps = 1e-12;

double primal_max(const SubproblemInstance& inst, const Vector& d) {
  return (inst.b + inst.G * d).maxCoeff();
}

}  // namespace

SubproblemSolution solve_minmax_ball(const SubproblemInstance& inst,
                                     double tol, int max_iter) {
  const int m = static_cast<int>(inst.G.rows());
  if (m < 1) throw std::invalid_argument("solve_minmax_ball: need at least one generator");
  if (inst.b.size() != m) throw std::invalid_argument("solve_minmax_ball: offset length mismatch");
  if (!(inst.radius > 0.0)) throw std::invalid_argument("solve_minmax_ball: radius must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solve_minmax_ball: tol must be > 0");
  if (!inst.G.allFinite() || !inst.b.allFinite())
    throw std::invalid_argument("solve_minmax_ball: non-finite input");

  // Dual lives in m dimensions; everything below works on the Gram matrix, so
  // only the final direction recovery touches n.
  const Matrix Q = inst.G * inst.G.transpose();
  const double delta = inst.radius;

  // Best primal candidate so far, kept as a recipe (multipliers, supported
  // combination weights, or span coefficients) so the n-dimensional step is
  // built only once.
  double best_p = inst.b.maxCoeff();  // d = 0 is always feasible
  int best_type = 0;  // 0: zero step, 1: boundary, 2: interior, 3: span coeffs
  Vector best_lam;
  std::vector<int> best_support;
  Vector best_mu;
  Vector best_u;
  double best_lb = -std::numeric_limits<double>::infinity();

  // Primal candidates from the current multipliers, evaluated through Q.
  // Boundary: d = -delta * G^T lam / ||G^T lam||, used when the ball binds.
  // Interior: the supported generators sit at the dual value, so solve
  // Q_AA mu = tau_dual - b_A and take d = G_A^T mu (clipped to the ball).
  auto probe = [&](const Vector& lam, bool try_interior) {
    Vector Ql = Q * lam;
    double s = std::sqrt(std::max(0.0, lam.dot(Ql)));
    double lb = inst.b.dot(lam) - delta * s;  // weak duality: lb <= optimum
    best_lb = std::max(best_lb, lb);
    if (s > kNormEps) {
      double p = (inst.b - (delta / s) * Ql).maxCoeff();
      if (p < best_p) {
        best_p = p;
        best_type = 1;
        best_lam = lam;
      }
    }
    if (!try_interior) return;
    std::vector<int> support;
    for (int a = 0; a < m; ++a)
      if (lam(a) > 1e-10) support.push_back(a);
    if (support.empty()) return;
    const int k = static_cast<int>(support.size());
    Matrix QAA(k, k);
    Vector rhs(k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) QAA(i, j) = Q(support[i], support[j]);
      rhs(i) = lb - inst.b(support[i]);
    }
    Vector mu = QAA.completeOrthogonalDecomposition().solve(rhs);
    double nd2 = mu.dot(QAA * mu);
    if (nd2 > delta * delta) mu *= delta / std::sqrt(nd2);
    Vector Gd = Vector::Zero(m);
    for (int i = 0; i < k; ++i) Gd += mu(i) * Q.col(support[i]);
    double p = (inst.b + Gd).maxCoeff();
    if (p < best_p) {
      best_p = p;
      best_type = 2;
      best_support = support;
      best_mu = mu;
    }
  };

  // Primal-dual hybrid gradient on the saddle
  //   min_{||d|| <= delta} max_{lam in simplex} lam^T (b + G d),
  // with the primal step kept in span coordinates d = G^T u so every
  // iteration costs O(m^2). The dual is nonsmooth where G^T lam vanishes
  // (interior optima), which defeats plain projected gradient; the splitting
  // has no such trouble.
  const double opn = std::sqrt(std::max(Q.norm(), kNormEps));  // >= ||G||_2
  const double sigma = delta / opn;          // primal step, on the ball's scale
  const double tstep = 1.0 / (delta * opn);  // dual step; sigma*tstep*||G||^2 <= 1

  Vector lam = Vector::Constant(m, 1.0 / m);
  Vector u = Vector::Zero(m);
  Vector Qu = Vector::Zero(m);
  bool converged = false;
  probe(lam, true);

  for (int it = 0; it < max_iter; ++it) {
    if (best_p - best_lb <= tol * (1.0 + std::abs(best_p))) {
      converged = true;  // certified by the duality gap
      break;
    }
    Vector u_new = u - sigma * lam;
    double nd2 = u_new.dot(Q * u_new);
    if (nd2 > delta * delta) u_new *= delta / std::sqrt(nd2);
    Vector Qu_new = Q * u_new;
    lam = project_simplex(lam + tstep * (inst.b + 2.0 * Qu_new - Qu));
    u = u_new;
    Qu = Qu_new;

    // The primal iterate itself is a candidate: p = max(b + G d), d = G^T u.
    double p = (inst.b + Qu).maxCoeff();
    if (p < best_p) {
      best_p = p;
      best_type = 3;
      best_u = u;
    }
    probe(lam, it % 50 == 49);
  }
  if (!converged) {
    probe(lam, true);
    converged = best_p - best_lb <= tol * (1.0 + std::abs(best_p));
  }

  SubproblemSolution sol;
  sol.multipliers = lam;
  sol.converged = converged;
  switch (best_type) {
    case 1: {
      Vector gt = inst.G.transpose() * best_lam;
      sol.direction = -(delta / gt.norm()) * gt;
      break;
    }
    case 2: {
      sol.direction = Vector::Zero(inst.G.cols());
      for (std::size_t i = 0; i < best_support.size(); ++i)
        sol.direction += best_mu(static_cast<int>(i)) *
                         inst.G.row(best_support[i]).transpose();
      break;
    }
    case 3:
      sol.direction = inst.G.transpose() * best_u;
      break;
    default:
      sol.direction = Vector::Zero(inst.G.cols());
  }
  double nd = sol.direction.norm();
  if (nd > delta) sol.direction *= delta / nd;
  sol.tau = primal_max(inst, sol.direction);
  if (inst.b.maxCoeff() < sol.tau) {  // never return anything worse than d = 0
    sol.tau = inst.b.maxCoeff();
    sol.direction.setZero();
  }
  return sol;
}

SubproblemSolution brute_force_oracle(const SubproblemInstance& inst,
                                      int grid_points_per_axis) {
  const int n = static_cast<int>(inst.G.cols());
  if (n > 3) throw std::invalid_argument("brute_force_oracle: dimension > 3 unsupported");
  if (grid_points_per_axis < 3)
    throw std::invalid_argument("brute_force_oracle: need at least 3 grid points per axis");

  const double delta = inst.radius;
  const int P = grid_points_per_axis;

  Vector best_d = Vector::Zero(n);
  double best = primal_max(inst, best_d);

  auto sweep = [&](const Vector& center, double half_width) {
    Vector d(n);
    std::vector<int> ix(n, 0);
    for (;;) {
      for (int j = 0; j < n; ++j)
        d(j) = center(j) - half_width + 2.0 * half_width * ix[j] / (P - 1);
      double nd = d.norm();
      Vector cand = (nd <= delta || nd == 0.0) ? d : Vector((delta / nd) * d);
      double v = primal_max(inst, cand);
      if (v < best) {
        best = v;
        best_d = cand;
      }
      int j = 0;
      while (j < n && ++ix[j] == P) ix[j++] = 0;
      if (j == n) break;
    }
  };

  sweep(Vector::Zero(n), delta);
  sweep(best_d, 2.0 * delta / (P - 1));  // one refinement around the incumbent

  SubproblemSolution sol;
  sol.tau = best;
  sol.direction = best_d;
  sol.multipliers = Vector::Zero(inst.G.rows());
  return sol;
}

}  // namespace trimfit
