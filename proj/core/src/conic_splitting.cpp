// SPDX-License-Identifier: Apache-2.0
// Operator splitting on the homogeneous self-dual embedding.
#include <algorithm>
#include <cmath>

#include "conic_internal.hpp"

namespace locbeam::conic::detail {

namespace {

// Projects the y block onto K* (zero cone dual is free space).
void project_dual_cone(const ConeSpec& spec, Eigen::Ref<Vector> y) {
  int row = 0;
  for (const Cone& cone : spec.cones) {
    switch (cone.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonneg:
        for (int k = 0; k < cone.size; ++k) y(row + k) = std::max(0.0, y(row + k));
        break;
      case ConeKind::kPsd:
        y.segment(row, cone.rows()) = project_psd(y.segment(row, cone.rows()), cone.size);
        break;
      case ConeKind::kExp:
        for (int k = 0; k < cone.size; ++k) {
          y.segment<3>(row + 3 * k) = project_exp_dual(y.segment<3>(row + 3 * k));
        }
        break;
    }
    row += cone.rows();
  }
}

}  // namespace

ConicSolution solve_splitting(const ConicProblem& problem, const SolverOptions& options) {
  const int n = problem.n();
  const int m = problem.m();
  const double tol = options.tol > 0.0 ? std::max(options.tol, 1e-12) : 1e-6;
  const int max_iters = options.max_iters > 0 ? options.max_iters : 20000;
  constexpr double kAlpha = 1.5;

  const Matrix& a = problem.a;
  const Vector& b = problem.b;
  const Vector& c = problem.c;
  Eigen::LLT<Matrix> normal(Matrix::Identity(n, n) + a.transpose() * a);

  // M = [[I, A^T], [-A, I]]
  auto solve_m = [&](const Vector& rhs) {
    Vector out(n + m);
    const Vector x = normal.solve(rhs.head(n) - a.transpose() * rhs.tail(m));
    out.head(n) = x;
    out.tail(m) = rhs.tail(m) + a * x;
    return out;
  };
  Vector h(n + m);
  h << c, b;
  const Vector p = solve_m(h);
  const double denom = 1.0 + h.dot(p);

  const int dim = n + m + 1;
  Vector u = Vector::Zero(dim);
  Vector v = Vector::Zero(dim);
  u(dim - 1) = 1.0;
  v(dim - 1) = 1.0;

  ConicSolution sol;
  sol.x = Vector::Zero(n);
  sol.y = Vector::Zero(m);
  sol.s = Vector::Zero(m);
  sol.status = SolveStatus::kMaxIters;
  const double bnorm = b.norm();
  const double cnorm = c.norm();

  for (int it = 1; it <= max_iters; ++it) {
    const Vector w = u + v;
    const Vector mw = solve_m(w.head(n + m));
    const double tau = (w(dim - 1) + h.dot(mw)) / denom;
    Vector ut(dim);
    ut.head(n + m) = mw - tau * p;
    ut(dim - 1) = tau;

    const Vector relaxed = kAlpha * ut + (1.0 - kAlpha) * u;
    Vector un = relaxed - v;
    project_dual_cone(problem.cones, un.segment(n, m));
    un(dim - 1) = std::max(0.0, un(dim - 1));
    v += un - relaxed;
    u = un;

    if (it % 10 != 0 && it != max_iters) continue;
    const double tau_k = u(dim - 1);
    const double kappa = v(dim - 1);
    const Vector xk = u.head(n);
    const Vector yk = u.segment(n, m);
    const Vector sk = v.segment(n, m);
    sol.iterations = it;
    if (tau_k > 1e-12 * std::max(1.0, kappa)) {
      const Vector x = xk / tau_k, y = yk / tau_k, s = sk / tau_k;
      const double pres = (a * x + s - b).norm() / (1.0 + bnorm);
      const double dres = (a.transpose() * y + c).norm() / (1.0 + cnorm);
      const double pobj = c.dot(x), dobj = -b.dot(y);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      if (pres <= tol && dres <= tol && gap <= tol) {
        sol.x = x;
        sol.y = y;
        sol.s = s;
        sol.objective = pobj;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;
        sol.status = SolveStatus::kOptimal;
        return sol;
      }
      if (it == max_iters) {
        sol.x = x;
        sol.y = y;
        sol.s = s;
        sol.objective = pobj;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.gap = gap;
      }
    }
    const double by = b.dot(yk);
    if (by < 0.0 && (a.transpose() * yk).norm() <= tol * (-by) * (1.0 + cnorm)) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
    const double cx = c.dot(xk);
    if (cx < 0.0 && (a * xk + sk).norm() <= tol * (-cx) * (1.0 + bnorm)) {
      sol.status = SolveStatus::kUnbounded;
      return sol;
    }
  }
  return sol;
}

}  // namespace locbeam::conic::detail
