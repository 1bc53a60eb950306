// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "locbeam/conic.hpp"

namespace locbeam::conic::detail {

ConicSolution solve_barrier(const ConicProblem& problem, const SolverOptions& options);
ConicSolution solve_splitting(const ConicProblem& problem, const SolverOptions& options);

bool in_dual_exp_cone(const Eigen::Vector3d& v, double tol);

}  // namespace locbeam::conic::detail
