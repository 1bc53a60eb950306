// SPDX-License-Identifier: Apache-2.0
#include "locbeam/conic.hpp"

#include <cmath>

#include "conic_internal.hpp"
#include "locbeam/error.hpp"

namespace locbeam::conic {

int Cone::rows() const {
  switch (kind) {
    case ConeKind::kZero:
    case ConeKind::kNonneg:
      return size;
    case ConeKind::kPsd:
      return svec_size(size);
    case ConeKind::kExp:
      return 3 * size;
  }
  return 0;
}

int ConeSpec::rows() const {
  int m = 0;
  for (const Cone& c : cones) m += c.rows();
  return m;
}

void ConeSpec::validate() const {
  for (const Cone& c : cones) {
    if (c.size < 1) throw InvalidArgument("cone dimensions must be at least 1");
  }
}

void ConicProblem::validate() const {
  cones.validate();
  if (a.rows() != b.size() || a.cols() != c.size()) throw DimensionMismatch("conic problem: A, b, c sizes differ");
  if (cones.rows() != b.size()) throw DimensionMismatch("conic problem: cone rows differ from constraint rows");
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) throw InvalidArgument("conic problem has non-finite data");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kMaxIters:
      return "max_iters";
  }
  return "unknown";
}

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (options.method == Method::kSplitting) return detail::solve_splitting(problem, options);
  return detail::solve_barrier(problem, options);
}

int svec_size(int side) { return side * (side + 1) / 2; }

int svec_side(int size) {
  const int side = static_cast<int>(std::lround((std::sqrt(8.0 * size + 1.0) - 1.0) / 2.0));
  if (svec_size(side) != size) throw DimensionMismatch("length is not a triangular number");
  return side;
}

int svec_index(int row, int col, int side) {
  if (row < col) std::swap(row, col);
  return col * side - col * (col - 1) / 2 + (row - col);
}

Vector svec(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  Vector v(svec_size(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = m(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = std::sqrt(2.0) * (m(i, j) + m(j, i)) / 2.0;
  }
  return v;
}

Matrix smat(const Vector& v, int side) {
  if (v.size() != svec_size(side)) throw DimensionMismatch("smat: wrong vector length");
  Matrix m(side, side);
  int k = 0;
  for (int j = 0; j < side; ++j) {
    m(j, j) = v(k++);
    for (int i = j + 1; i < side; ++i) {
      m(i, j) = v(k++) / std::sqrt(2.0);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Vector project_psd(const Vector& v, int side) {
  const Matrix m = smat(v, side);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in PSD projection");
  const Vector lambda = es.eigenvalues().cwiseMax(0.0);
  const Matrix p = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  return svec(p);
}

bool in_exp_cone(const Eigen::Vector3d& v, double tol) {
  const double x = v(0), y = v(1), z = v(2);
  if (y > 0.0) {
    if (z <= 0.0) return false;
    return y * std::log(z / y) - x >= -tol * std::max(1.0, v.norm());
  }
  return y >= -tol && x <= tol && z >= -tol;
}

namespace detail {

bool in_dual_exp_cone(const Eigen::Vector3d& v, double tol) {
  const double u = v(0), w = v(1), z = v(2);
  if (u < 0.0) {
    if (z <= 0.0) return false;
    // -u e^{w/u} <= e z  <=>  log(-u) + w/u <= 1 + log z
    return std::log(-u) + w / u <= 1.0 + std::log(z) + tol;
  }
  return u <= tol && w >= -tol && z >= -tol;
}

}  // namespace detail

namespace {

// Boundary point parametrized by rho = x/y of the projection; zero of h marks the projection.
struct ExpRoot {
  Eigen::Vector3d v;

  double y_of(double rho) const { return (v(1) - (1.0 - rho) * v(0)) / (rho * rho - rho + 1.0); }
  double m_of(double rho) const { return (v(0) - rho * v(1)) / (rho * rho - rho + 1.0); }
  double h(double rho) const {
    return y_of(rho) * std::exp(rho) - m_of(rho) * std::exp(-rho) - v(2);
  }
  Eigen::Vector3d point(double rho) const {
    const double y = y_of(rho);
    return Eigen::Vector3d(rho * y, y, y * std::exp(rho));
  }
};

bool bisect(const ExpRoot& f, double lo, double hi, double& root) {
  double flo = f.h(lo), fhi = f.h(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0) return false;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f.h(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  root = 0.5 * (lo + hi);
  return true;
}

bool smooth_boundary_projection(const Eigen::Vector3d& v, Eigen::Vector3d& p) {
  const ExpRoot f{v};
  const double x = v(0), y = v(1);
  constexpr double kCap = 600.0;
  double lo = -kCap, hi = kCap;
  if (y > 0.0) {
    hi = std::min(hi, x / y);
    if (x > 0.0) lo = std::max(lo, 1.0 - y / x);
  } else if (y < 0.0) {
    if (!(x > 0.0)) return false;
    lo = std::max(lo, 1.0 + (-y) / x);
  } else {
    if (!(x > 0.0)) return false;
    lo = std::max(lo, 1.0);
  }
  if (!(lo < hi)) return false;
  double a = lo, b = hi;
  if (a == -kCap && b != kCap) {
    double step = 1.0;
    a = b - step;
    while (f.h(a) > 0.0 && a > -kCap) {
      step *= 2.0;
      a = std::max(-kCap, b - step);
    }
  } else if (b == kCap && a != -kCap) {
    double step = 1.0;
    b = a + step;
    while (f.h(b) < 0.0 && b < kCap) {
      step *= 2.0;
      b = std::min(kCap, a + step);
    }
  }
  double rho = 0.0;
  if (!bisect(f, a, b, rho)) {
    // fall back to a coarse scan of the bracket
    const int steps = 2000;
    bool found = false;
    double prev = a, fprev = f.h(a);
    for (int k = 1; k <= steps && !found; ++k) {
      const double cur = a + (b - a) * k / steps;
      const double fcur = f.h(cur);
      if (std::isfinite(fprev) && std::isfinite(fcur) && fprev * fcur <= 0.0) found = bisect(f, prev, cur, rho);
      prev = cur;
      fprev = fcur;
    }
    if (!found) return false;
  }
  if (!(f.y_of(rho) > 0.0)) return false;
  p = f.point(rho);
  return p.allFinite();
}

}  // namespace

Eigen::Vector3d project_exp(const Eigen::Vector3d& v) {
  if (in_exp_cone(v, 0.0)) return v;
  if (detail::in_dual_exp_cone(-v, 0.0)) return Eigen::Vector3d::Zero();
  const double x = v(0), y = v(1), z = v(2);
  if (x < 0.0 && y < 0.0) return Eigen::Vector3d(x, 0.0, std::max(z, 0.0));

  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_dist = v.norm();
  const Eigen::Vector3d edge(std::min(x, 0.0), 0.0, std::max(z, 0.0));
  if ((v - edge).norm() < best_dist) {
    best = edge;
    best_dist = (v - edge).norm();
  }
  Eigen::Vector3d p;
  if (smooth_boundary_projection(v, p) && (v - p).norm() < best_dist) best = p;
  return best;
}

Eigen::Vector3d project_exp_dual(const Eigen::Vector3d& v) { return v + project_exp(-v); }

Matrix hermitian_embed(const CMatrix& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("hermitian_embed needs a square matrix");
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(1.0, h.norm())) {
    throw InvalidArgument("hermitian_embed: input is not Hermitian");
  }
  const Eigen::Index n = h.rows();
  Matrix e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = h.real();
  e.topRightCorner(n, n) = -h.imag();
  e.bottomLeftCorner(n, n) = h.imag();
  e.bottomRightCorner(n, n) = h.real();
  return e;
}

}  // namespace locbeam::conic
