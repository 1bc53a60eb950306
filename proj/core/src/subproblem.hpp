// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "locbeam/conic.hpp"
#include "locbeam/conic_builder.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/gains.hpp"

namespace locbeam::optimizer::detail {

// Localization constraint tr(N^-1) <= bound on the SNR-unit EFIM N of one MS.
struct LocalizationSpec {
  int ms = 0;
  const GainTable* gains = nullptr;
  std::vector<Mat2> direction;
  bool tdoa = false;
  // pair[j * n_bs + l], j < l
  std::vector<Mat2> pair;
  double clock_prior = 0.0;
  // TDOA only: replace the frozen denominator by the tangent minorant of 1/d (one active BS).
  bool minorant = false;
  Mat2 subtract = Mat2::Zero();
  double bound = kInf;
};

// One convex step of the MM scheme. Covariances are in normalized power units and the noise is 1.
struct SubproblemSpec {
  std::vector<int> antennas;
  int n_ms = 0;
  int n_blocks = 1;
  std::vector<bool> active;
  double objective_weight = 1.0;
  const GainTable* rate_gains = nullptr;
  double rate_prefactor = 0.0;
  std::vector<double> rate_req;
  std::vector<LocalizationSpec> loc;
  const CovarianceSet* expansion = nullptr;
};

struct Subproblem {
  conic::ConicProblem problem;
  int n_ms = 0;
  int n_blocks = 1;
  // (j, k, b) in covariance order; side 0 for inactive BSs
  std::vector<conic::HermitianVar> sigma;

  CovarianceSet extract(const Vector& x, const CovarianceSet& base) const;
};

Subproblem build_subproblem(const SubproblemSpec& spec);

// SNR-unit EFIM of one MS with the TDOA denominator taken from `denominator_at`.
Mat2 localization_matrix(const LocalizationSpec& loc, const CovarianceSet& cov, const CovarianceSet& denominator_at);

}  // namespace locbeam::optimizer::detail
