// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "locbeam/types.hpp"

namespace locbeam::conic {

enum class ConeKind { kZero, kNonneg, kPsd, kExp };

struct Cone {
  ConeKind kind = ConeKind::kNonneg;
  // zero/nonneg: dimension; psd: matrix side; exp: number of 3-dimensional cones
  int size = 1;

  int rows() const;
};

struct ConeSpec {
  std::vector<Cone> cones;

  int rows() const;
  void validate() const;
};

// minimize c^T x subject to A x + s = b, s in K.
struct ConicProblem {
  Vector c;
  Matrix a;
  Vector b;
  ConeSpec cones;

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(b.size()); }
  void validate() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIters };
std::string to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::kMaxIters;
  Vector x;
  Vector y;
  Vector s;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

enum class Method { kBarrier, kSplitting };

struct SolverOptions {
  Method method = Method::kBarrier;
  // Relative duality-gap target (barrier) or residual target (splitting).
  double tol = 1e-9;
  // Newton steps (barrier) or iterations (splitting); 0 selects the method default.
  int max_iters = 0;
  // Optional starting point for the barrier method; used when strictly feasible.
  Vector warm_start;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

// Symmetric-matrix vectorization: lower triangle, column-major, off-diagonals scaled by sqrt(2).
int svec_size(int side);
int svec_side(int size);
Vector svec(const Matrix& m);
Matrix smat(const Vector& v, int side);
int svec_index(int row, int col, int side);

Vector project_psd(const Vector& v, int side);
Eigen::Vector3d project_exp(const Eigen::Vector3d& v);
// Projection onto the dual cone K*_exp = {(u,v,w): u < 0, -u e^{v/u} <= e w} closure.
Eigen::Vector3d project_exp_dual(const Eigen::Vector3d& v);
bool in_exp_cone(const Eigen::Vector3d& v, double tol = 0.0);

// [[Re H, -Im H], [Im H, Re H]]
Matrix hermitian_embed(const CMatrix& h);

void to_json(nlohmann::json& j, const ConicProblem& p);
void from_json(const nlohmann::json& j, ConicProblem& p);

}  // namespace locbeam::conic
