// SPDX-License-Identifier: Apache-2.0
// Primal log-barrier interior-point method for the standard-form cone program.
#include <algorithm>
#include <cmath>
#include <functional>

#include "conic_internal.hpp"
#include "locbeam/error.hpp"

namespace locbeam::conic::detail {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kMu = 20.0;
constexpr double kCenterTol = 1e-9;
constexpr int kLooseCenterSteps = 25;
constexpr double kRoundoff = 1e-13;
constexpr double kLooseCenterTol = 1e-4;

struct Block {
  ConeKind kind = ConeKind::kNonneg;
  int side = 0;
  int row0 = 0;
  std::vector<int> cols;
  Matrix a;
  Vector b;

  int rows() const { return static_cast<int>(b.size()); }
  double nu() const {
    switch (kind) {
      case ConeKind::kNonneg:
        return 1.0;
      case ConeKind::kExp:
        return 3.0;
      case ConeKind::kPsd:
        return side;
      default:
        return 0.0;
    }
  }
};

struct Barrier {
  int n = 0;
  Vector c;
  std::vector<Block> blocks;
  double nu = 0.0;
};

Vector slack(const Block& blk, const Vector& u) {
  Vector s = blk.b;
  for (std::size_t k = 0; k < blk.cols.size(); ++k) s.noalias() -= blk.a.col(k) * u(blk.cols[k]);
  return s;
}

bool interior(const Block& blk, const Vector& s) {
  switch (blk.kind) {
    case ConeKind::kNonneg:
      return s(0) > 0.0;
    case ConeKind::kExp: {
      const double x = s(0), y = s(1), z = s(2);
      if (!(y > 0.0 && z > 0.0)) return false;
      return y * std::log(z / y) - x > 0.0;
    }
    case ConeKind::kPsd: {
      Eigen::LLT<Matrix> llt(smat(s, blk.side));
      return llt.info() == Eigen::Success;
    }
    default:
      return false;
  }
}

// Barrier value; gradient and Hessian with respect to the block slack when requested.
double barrier(const Block& blk, const Vector& s, Vector* grad, Matrix* hess) {
  switch (blk.kind) {
    case ConeKind::kNonneg: {
      if (grad) *grad = Vector::Constant(1, -1.0 / s(0));
      if (hess) *hess = Matrix::Constant(1, 1, 1.0 / (s(0) * s(0)));
      return -std::log(s(0));
    }
    case ConeKind::kExp: {
      const double x = s(0), y = s(1), z = s(2);
      const double lzy = std::log(z / y);
      const double psi = y * lzy - x;
      if (grad || hess) {
        const Eigen::Vector3d dpsi(-1.0, lzy - 1.0, y / z);
        if (grad) {
          *grad = -dpsi / psi;
          (*grad)(1) -= 1.0 / y;
          (*grad)(2) -= 1.0 / z;
        }
        if (hess) {
          Eigen::Matrix3d d2psi = Eigen::Matrix3d::Zero();
          d2psi(1, 1) = -1.0 / y;
          d2psi(1, 2) = d2psi(2, 1) = 1.0 / z;
          d2psi(2, 2) = -y / (z * z);
          Eigen::Matrix3d h = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
          h(1, 1) += 1.0 / (y * y);
          h(2, 2) += 1.0 / (z * z);
          *hess = h;
        }
      }
      return -std::log(psi) - std::log(y) - std::log(z);
    }
    case ConeKind::kPsd: {
      const int n = blk.side;
      const Matrix m = smat(s, n);
      Eigen::LLT<Matrix> llt(m);
      double value = 0.0;
      for (int k = 0; k < n; ++k) value -= 2.0 * std::log(llt.matrixL()(k, k));
      if (grad || hess) {
        const Matrix p = llt.solve(Matrix::Identity(n, n));
        if (grad) *grad = -svec(p);
        if (hess) {
          const int d = svec_size(n);
          Matrix h(d, d);
          int r = 0;
          for (int j = 0; j < n; ++j) {
            for (int i = j; i < n; ++i, ++r) {
              const double cij = i == j ? 1.0 : kSqrt2;
              int q = 0;
              for (int l = 0; l < n; ++l) {
                for (int k = l; k < n; ++k, ++q) {
                  const double ckl = k == l ? 1.0 : kSqrt2;
                  h(r, q) = cij * ckl * 0.5 * (p(i, k) * p(j, l) + p(i, l) * p(j, k));
                }
              }
            }
          }
          *hess = h;
        }
      }
      return value;
    }
    default:
      return 0.0;
  }
}

bool all_interior(const Barrier& bp, const Vector& u) {
  for (const Block& blk : bp.blocks) {
    if (!interior(blk, slack(blk, u))) return false;
  }
  return true;
}

double objective(const Barrier& bp, const Vector& u, double t) {
  double f = t * bp.c.dot(u);
  for (const Block& blk : bp.blocks) f += barrier(blk, slack(blk, u), nullptr, nullptr);
  return f;
}

class NewtonSystem {
 public:
  explicit NewtonSystem(const Barrier& bp) : bp_(bp) {}

  // Solves (A^T H A) du = -grad; returns false when the system cannot be solved.
  bool solve(const Vector& u, double t, Vector& grad, Vector& du) {
    const int n = bp_.n;
    grad = t * bp_.c;
    hess_.setZero(n, n);
    Vector g;
    Matrix h;
    for (const Block& blk : bp_.blocks) {
      barrier(blk, slack(blk, u), &g, &h);
      const Vector ga = blk.a.transpose() * g;
      const Matrix ha = blk.a.transpose() * (h * blk.a);
      for (std::size_t p = 0; p < blk.cols.size(); ++p) {
        grad(blk.cols[p]) -= ga(p);
        for (std::size_t q = 0; q < blk.cols.size(); ++q) hess_(blk.cols[q], blk.cols[p]) += ha(q, p);
      }
    }
    Eigen::LLT<Matrix> llt(hess_);
    if (llt.info() == Eigen::Success) {
      du = -llt.solve(grad);
    } else {
      const double reg = 1e-13 * std::max(1.0, hess_.diagonal().cwiseAbs().maxCoeff());
      Eigen::LDLT<Matrix> ldlt(hess_ + reg * Matrix::Identity(n, n));
      du = -ldlt.solve(grad);
      du += -ldlt.solve(grad + hess_ * du);
    }
    return du.allFinite();
  }

 private:
  const Barrier& bp_;
  Matrix hess_;
};

enum class CenterResult { kCentered, kStopped, kStalled, kBudget, kUnbounded };

// Newton centering of t c^T u + phi(b - A u) from a strictly interior u.
CenterResult center(const Barrier& bp, Vector& u, double t, int& budget, const std::function<bool(const Vector&)>& stop) {
  NewtonSystem sys(bp);
  Vector grad, du;
  double f = objective(bp, u, t);
  for (int steps = 0;; ++steps) {
    if (budget <= 0) return CenterResult::kBudget;
    --budget;
    if (!sys.solve(u, t, grad, du)) return CenterResult::kStalled;
    const double lambda2 = -grad.dot(du);
    if (!(lambda2 >= 0.0)) return CenterResult::kStalled;
    // rounding in f limits the attainable decrement once t is large
    if (lambda2 / 2.0 <= kCenterTol + kRoundoff * std::abs(f)) return CenterResult::kCentered;
    if (steps >= kLooseCenterSteps && lambda2 / 2.0 <= kLooseCenterTol) return CenterResult::kCentered;
    double step = 1.0;
    Vector trial = u + step * du;
    while (!all_interior(bp, trial)) {
      step *= 0.5;
      if (step < 1e-14) return CenterResult::kStalled;
      trial = u + step * du;
    }
    double ft = objective(bp, trial, t);
    while (!(ft <= f - 0.01 * step * lambda2)) {
      step *= 0.5;
      if (step < 1e-14) return CenterResult::kStalled;
      trial = u + step * du;
      ft = objective(bp, trial, t);
    }
    const bool progress = ft < f;
    u = trial;
    f = ft;
    if (!progress) return CenterResult::kStalled;
    if (!std::isfinite(f) || u.cwiseAbs().maxCoeff() > 1e13) return CenterResult::kUnbounded;
    if (stop && stop(u)) return CenterResult::kStopped;
  }
}

Eigen::VectorXd interior_direction(const Block& blk) {
  switch (blk.kind) {
    case ConeKind::kNonneg:
      return Vector::Ones(1);
    case ConeKind::kExp:
      return Eigen::Vector3d(-1.0, 1.0, 1.0);
    case ConeKind::kPsd:
      return svec(Matrix::Identity(blk.side, blk.side));
    default:
      return Vector();
  }
}

// Finds a strictly interior point by minimizing r subject to b - A u + r e in K, r >= -1.
bool phase_one_boxed(const Barrier& bp, Vector& u, int& budget, bool& infeasible, double box_scale) {
  infeasible = false;
  Barrier aug;
  aug.n = bp.n + 1;
  aug.c = Vector::Zero(aug.n);
  aug.c(bp.n) = 1.0;
  for (const Block& blk : bp.blocks) {
    Block b2 = blk;
    b2.cols.push_back(bp.n);
    b2.a.conservativeResize(Eigen::NoChange, b2.a.cols() + 1);
    b2.a.col(b2.a.cols() - 1) = -interior_direction(blk);
    aug.blocks.push_back(std::move(b2));
  }
  Block floor;
  floor.kind = ConeKind::kNonneg;
  floor.cols = {bp.n};
  floor.a = Matrix::Constant(1, 1, -1.0);
  floor.b = Vector::Ones(1);
  aug.blocks.push_back(floor);
  aug.nu = bp.nu + 1.0;
  // box on the original variables keeps the auxiliary problem bounded
  const double box = box_scale * (1.0 + u.cwiseAbs().maxCoeff());
  for (int k = 0; k < bp.n; ++k) {
    for (double sign : {1.0, -1.0}) {
      Block side;
      side.kind = ConeKind::kNonneg;
      side.cols = {k};
      side.a = Matrix::Constant(1, 1, sign);
      side.b = Vector::Constant(1, box);
      aug.blocks.push_back(side);
      aug.nu += 1.0;
    }
  }

  Vector ua(aug.n);
  ua.head(bp.n) = u;
  double r = 1.0;
  ua(bp.n) = r;
  for (int k = 0; k < 200 && !all_interior(aug, ua); ++k) {
    r *= 2.0;
    ua(bp.n) = r;
  }
  if (!all_interior(aug, ua)) return false;

  auto done = [&](const Vector& x) { return x(bp.n) < 0.0; };
  double t = (bp.nu + 1.0) / std::max(1.0, r);
  for (int outer = 0; outer < 200; ++outer) {
    const CenterResult res = center(aug, ua, t, budget, done);
    if (ua(bp.n) < 0.0 && all_interior(bp, ua.head(bp.n))) {
      u = ua.head(bp.n);
      return true;
    }
    if (res == CenterResult::kBudget) return false;
    if (res == CenterResult::kUnbounded) return false;
    // r - nu/t bounds the optimal r from below; a positive bound certifies an empty interior
    const double lower = ua(bp.n) - aug.nu / t;
    if (lower > -1e-9 && (res == CenterResult::kStalled || lower > -1e-12)) {
      infeasible = true;
      return false;
    }
    if (res == CenterResult::kCentered && aug.nu / t < 1e-12) return false;
    t *= kMu;
  }
  return false;
}

// Barrier weight closest to centrality at u: argmin_t ||t c + grad phi||_{H^-1}.
double initial_t(const Barrier& bp, const Vector& u) {
  const double fallback = bp.nu / (std::abs(bp.c.dot(u)) + 1.0);
  NewtonSystem sys(bp);
  Vector grad, du0, du1;
  if (!sys.solve(u, 0.0, grad, du0) || !sys.solve(u, 1.0, grad, du1)) return fallback;
  const Vector hc = du0 - du1;
  const double chc = bp.c.dot(hc);
  if (!(chc > 0.0)) return fallback;
  const double t = bp.c.dot(du0) / chc;
  if (!(t > 0.0) || !std::isfinite(t)) return fallback;
  return std::max(t, 1e-3 * fallback);
}

// The box on the original variables is widened until a point is found or the largest box is
// certified empty.
bool phase_one(const Barrier& bp, Vector& u, int& budget, bool& infeasible) {
  infeasible = false;
  if (all_interior(bp, u)) return true;
  for (double box : {1e3, 1e6, 1e9}) {
    Vector trial = u;
    if (phase_one_boxed(bp, trial, budget, infeasible, box)) {
      u = trial;
      return true;
    }
    if (budget <= 0) return false;
  }
  return false;
}

}  // namespace

ConicSolution solve_barrier(const ConicProblem& problem, const SolverOptions& options) {
  const int n = problem.n();
  const int m = problem.m();
  const double tol = options.tol > 0.0 ? options.tol : 1e-9;
  int budget = options.max_iters > 0 ? options.max_iters : 500;

  // split zero-cone rows from conic rows
  std::vector<int> zero_rows;
  {
    int row = 0;
    for (const Cone& cone : problem.cones.cones) {
      if (cone.kind == ConeKind::kZero) {
        for (int k = 0; k < cone.rows(); ++k) zero_rows.push_back(row + k);
      }
      row += cone.rows();
    }
  }

  Vector x0 = Vector::Zero(n);
  Matrix basis;
  bool reduced = !zero_rows.empty();
  ConicSolution sol;
  sol.x = Vector::Zero(n);
  sol.y = Vector::Zero(m);
  sol.s = Vector::Zero(m);
  if (reduced) {
    Matrix e(zero_rows.size(), n);
    Vector f(zero_rows.size());
    for (std::size_t k = 0; k < zero_rows.size(); ++k) {
      e.row(k) = problem.a.row(zero_rows[k]);
      f(k) = problem.b(zero_rows[k]);
    }
    Eigen::BDCSVD<Matrix> svd(e, Eigen::ComputeFullV);
    const Vector sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) > 1e-12 * std::max(1.0, smax)) ++rank;
    }
    x0 = e.completeOrthogonalDecomposition().solve(f);
    if ((e * x0 - f).norm() > 1e-9 * (1.0 + f.norm())) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
    basis = svd.matrixV().rightCols(n - rank);
  }
  const int nr = reduced ? static_cast<int>(basis.cols()) : n;

  Barrier bp;
  bp.n = nr;
  bp.c = reduced ? Vector(basis.transpose() * problem.c) : problem.c;
  int row = 0;
  auto add_block = [&](ConeKind kind, int side, int r0, int rows) {
    Block blk;
    blk.kind = kind;
    blk.side = side;
    blk.row0 = r0;
    Matrix a_rows = problem.a.middleRows(r0, rows);
    Vector b_rows = problem.b.segment(r0, rows);
    if (reduced) {
      b_rows -= a_rows * x0;
      a_rows = a_rows * basis;
    }
    for (int k = 0; k < nr; ++k) {
      if (a_rows.col(k).cwiseAbs().maxCoeff() > 0.0) blk.cols.push_back(k);
    }
    blk.a.resize(rows, blk.cols.size());
    for (std::size_t k = 0; k < blk.cols.size(); ++k) blk.a.col(k) = a_rows.col(blk.cols[k]);
    blk.b = b_rows;
    bp.nu += blk.nu();
    bp.blocks.push_back(std::move(blk));
  };
  for (const Cone& cone : problem.cones.cones) {
    switch (cone.kind) {
      case ConeKind::kZero:
        break;
      case ConeKind::kNonneg:
        for (int k = 0; k < cone.size; ++k) add_block(ConeKind::kNonneg, 0, row + k, 1);
        break;
      case ConeKind::kExp:
        for (int k = 0; k < cone.size; ++k) add_block(ConeKind::kExp, 0, row + 3 * k, 3);
        break;
      case ConeKind::kPsd:
        add_block(ConeKind::kPsd, cone.size, row, cone.rows());
        break;
    }
    row += cone.rows();
  }

  auto finish = [&](const Vector& u, double t, SolveStatus status) {
    sol.status = status;
    sol.x = reduced ? Vector(x0 + basis * u) : u;
    sol.s = problem.b - problem.a * sol.x;
    for (int zr : zero_rows) sol.s(zr) = 0.0;
    sol.objective = problem.c.dot(sol.x);
    if (t > 0.0) {
      Vector g;
      for (const Block& blk : bp.blocks) {
        barrier(blk, slack(blk, u), &g, nullptr);
        sol.y.segment(blk.row0, blk.rows()) = -g / t;
      }
      Vector resid = problem.c + problem.a.transpose() * sol.y;
      if (!zero_rows.empty()) {
        Matrix et(n, zero_rows.size());
        for (std::size_t k = 0; k < zero_rows.size(); ++k) et.col(k) = problem.a.row(zero_rows[k]).transpose();
        const Vector yz = et.completeOrthogonalDecomposition().solve(-resid);
        for (std::size_t k = 0; k < zero_rows.size(); ++k) sol.y(zero_rows[k]) = yz(k);
        resid = problem.c + problem.a.transpose() * sol.y;
      }
      sol.dual_residual = resid.norm() / (1.0 + problem.c.norm());
      sol.gap = std::abs(sol.objective + problem.b.dot(sol.y)) / (1.0 + std::abs(sol.objective));
    }
    double pres = 0.0;
    for (int zr : zero_rows) pres += std::pow(problem.a.row(zr).dot(sol.x) - problem.b(zr), 2);
    sol.primal_residual = std::sqrt(pres) / (1.0 + problem.b.norm());
  };

  const int start_budget = budget;
  Vector u = Vector::Zero(nr);
  if (options.warm_start.size() == n) {
    Vector guess = reduced ? Vector(basis.transpose() * (options.warm_start - x0)) : options.warm_start;
    if (all_interior(bp, guess)) u = guess;
  }
  if (bp.blocks.empty()) {
    if (bp.c.norm() > 1e-12 * (1.0 + problem.c.norm())) {
      sol.status = SolveStatus::kUnbounded;
      return sol;
    }
    finish(u, 0.0, SolveStatus::kOptimal);
    return sol;
  }
  bool infeasible = false;
  if (!phase_one(bp, u, budget, infeasible)) {
    sol.iterations = start_budget - budget;
    sol.status = infeasible ? SolveStatus::kInfeasible : SolveStatus::kMaxIters;
    if (infeasible) return sol;
    finish(u, 0.0, SolveStatus::kMaxIters);
    return sol;
  }

  double t = initial_t(bp, u);
  SolveStatus status = SolveStatus::kMaxIters;
  while (true) {
    const CenterResult res = center(bp, u, t, budget, nullptr);
    if (res == CenterResult::kUnbounded) {
      status = SolveStatus::kUnbounded;
      break;
    }
    if (res == CenterResult::kBudget) break;
    const double obj = bp.c.dot(u) + (reduced ? problem.c.dot(x0) : 0.0);
    if (bp.nu / t <= tol * std::max(1.0, std::abs(obj))) {
      status = SolveStatus::kOptimal;
      break;
    }
    if (res == CenterResult::kStalled && bp.nu / t <= 1e3 * tol * std::max(1.0, std::abs(obj))) {
      status = SolveStatus::kOptimal;
      break;
    }
    t *= kMu;
  }
  sol.iterations = start_budget - budget;
  finish(u, t, status);
  if (status == SolveStatus::kMaxIters && options.warm_start.size() > 0) {
    SolverOptions cold = options;
    cold.warm_start = Vector();
    ConicSolution retry = solve_barrier(problem, cold);
    retry.iterations += sol.iterations;
    return retry;
  }
  return sol;
}

}  // namespace locbeam::conic::detail
