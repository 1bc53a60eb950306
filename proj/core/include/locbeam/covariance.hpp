// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "locbeam/types.hpp"

namespace locbeam {

// Transmit covariances Sigma_{ji,b}: one Hermitian PSD matrix per (BS j, MS i, block b).
class CovarianceSet {
 public:
  CovarianceSet() = default;
  CovarianceSet(const std::vector<int>& antennas, int n_ms, int n_blocks = 1);

  static CovarianceSet isotropic(const std::vector<int>& antennas, int n_ms, int n_blocks,
                                 double power_per_pair);

  int n_bs() const { return static_cast<int>(antennas_.size()); }
  int n_ms() const { return n_ms_; }
  int n_blocks() const { return n_blocks_; }
  int antennas(int j) const { return antennas_.at(j); }
  const std::vector<int>& antenna_counts() const { return antennas_; }

  CMatrix& at(int j, int i, int b = 0) { return data_.at(index(j, i, b)); }
  const CMatrix& at(int j, int i, int b = 0) const { return data_.at(index(j, i, b)); }

  double total_power() const;
  double bs_power(int j) const;
  void scale(double factor);
  bool same_shape(const CovarianceSet& other) const;
  void validate(double tol = 1e-10) const;

 private:
  int index(int j, int i, int b) const { return (j * n_ms_ + i) * n_blocks_ + b; }

  std::vector<int> antennas_;
  int n_ms_ = 0;
  int n_blocks_ = 1;
  std::vector<CMatrix> data_;
};

double frobenius_distance(const CovarianceSet& a, const CovarianceSet& b);

class BeamformerSet {
 public:
  BeamformerSet() = default;
  BeamformerSet(const std::vector<int>& antennas, int n_ms, int n_blocks = 1);

  int n_bs() const { return static_cast<int>(antennas_.size()); }
  int n_ms() const { return n_ms_; }
  int n_blocks() const { return n_blocks_; }
  int antennas(int j) const { return antennas_.at(j); }

  CVector& at(int j, int i, int b = 0) { return data_.at(index(j, i, b)); }
  const CVector& at(int j, int i, int b = 0) const { return data_.at(index(j, i, b)); }

  double total_power() const;
  double bs_power(int j) const;
  void scale(double factor);
  CovarianceSet covariances() const;

 private:
  int index(int j, int i, int b) const { return (j * n_ms_ + i) * n_blocks_ + b; }

  std::vector<int> antennas_;
  int n_ms_ = 0;
  int n_blocks_ = 1;
  std::vector<CVector> data_;
};

}  // namespace locbeam
