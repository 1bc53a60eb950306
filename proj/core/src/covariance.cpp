// SPDX-License-Identifier: Apache-2.0
#include "locbeam/covariance.hpp"

#include <cmath>

#include "locbeam/error.hpp"

namespace locbeam {

CovarianceSet::CovarianceSet(const std::vector<int>& antennas, int n_ms, int n_blocks)
    : antennas_(antennas), n_ms_(n_ms), n_blocks_(n_blocks) {
  if (n_ms < 0 || n_blocks < 1) throw InvalidArgument("invalid covariance set shape");
  data_.reserve(antennas.size() * n_ms * n_blocks);
  for (int m : antennas) {
    for (int k = 0; k < n_ms * n_blocks; ++k) data_.push_back(CMatrix::Zero(m, m));
  }
}

CovarianceSet CovarianceSet::isotropic(const std::vector<int>& antennas, int n_ms, int n_blocks,
                                       double power_per_pair) {
  CovarianceSet s(antennas, n_ms, n_blocks);
  for (int j = 0; j < s.n_bs(); ++j) {
    const int m = antennas[j];
    for (int i = 0; i < n_ms; ++i) {
      for (int b = 0; b < n_blocks; ++b) {
        s.at(j, i, b) = CMatrix::Identity(m, m) * (power_per_pair / m);
      }
    }
  }
  return s;
}

double CovarianceSet::total_power() const {
  double p = 0.0;
  for (const auto& s : data_) p += s.trace().real();
  return p;
}

double CovarianceSet::bs_power(int j) const {
  double p = 0.0;
  for (int i = 0; i < n_ms_; ++i) {
    for (int b = 0; b < n_blocks_; ++b) p += at(j, i, b).trace().real();
  }
  return p;
}

void CovarianceSet::scale(double factor) {
  for (auto& s : data_) s *= factor;
}

bool CovarianceSet::same_shape(const CovarianceSet& other) const {
  return antennas_ == other.antennas_ && n_ms_ == other.n_ms_ && n_blocks_ == other.n_blocks_;
}

void CovarianceSet::validate(double tol) const {
  for (const auto& s : data_) {
    const double scale = std::max(1.0, s.norm());
    if ((s - s.adjoint()).norm() > tol * scale) throw InvalidArgument("covariance is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(s, Eigen::EigenvaluesOnly);
    const double tr = std::abs(s.trace().real());
    if (es.eigenvalues().minCoeff() < -1e-9 * std::max(tr, 1e-300)) {
      throw InvalidArgument("covariance is not positive semidefinite");
    }
  }
}

double frobenius_distance(const CovarianceSet& a, const CovarianceSet& b) {
  if (!a.same_shape(b)) throw DimensionMismatch("covariance sets differ in shape");
  double d = 0.0;
  for (int j = 0; j < a.n_bs(); ++j) {
    for (int i = 0; i < a.n_ms(); ++i) {
      for (int k = 0; k < a.n_blocks(); ++k) d += (a.at(j, i, k) - b.at(j, i, k)).norm();
    }
  }
  return d;
}

BeamformerSet::BeamformerSet(const std::vector<int>& antennas, int n_ms, int n_blocks)
    : antennas_(antennas), n_ms_(n_ms), n_blocks_(n_blocks) {
  if (n_ms < 0 || n_blocks < 1) throw InvalidArgument("invalid beamformer set shape");
  for (int m : antennas) {
    for (int k = 0; k < n_ms * n_blocks; ++k) data_.push_back(CVector::Zero(m));
  }
}

double BeamformerSet::total_power() const {
  double p = 0.0;
  for (const auto& w : data_) p += w.squaredNorm();
  return p;
}

double BeamformerSet::bs_power(int j) const {
  double p = 0.0;
  for (int i = 0; i < n_ms_; ++i) {
    for (int b = 0; b < n_blocks_; ++b) p += at(j, i, b).squaredNorm();
  }
  return p;
}

void BeamformerSet::scale(double factor) {
  for (auto& w : data_) w *= factor;
}

CovarianceSet BeamformerSet::covariances() const {
  CovarianceSet s(antennas_, n_ms_, n_blocks_);
  for (int j = 0; j < n_bs(); ++j) {
    for (int i = 0; i < n_ms_; ++i) {
      for (int b = 0; b < n_blocks_; ++b) s.at(j, i, b) = at(j, i, b) * at(j, i, b).adjoint();
    }
  }
  return s;
}

}  // namespace locbeam
