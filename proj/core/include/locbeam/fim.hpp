// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "locbeam/channel.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/gains.hpp"
#include "locbeam/scene.hpp"
#include "locbeam/types.hpp"

namespace locbeam::fim {

Vec2 direction(double angle);
Mat2 j_phi(double angle);
Mat2 j_phi_pair(double angle, double other);
Mat2 q_phi_toa(double angle_hat, double halfwidth);
Mat2 q_phi_tdoa(double angle_hat, double other_hat, double halfwidth, double other_halfwidth);

// Equivalent Fisher information of one MS position. `normalized` is J / scale, i.e. a sum of
// SNR-weighted direction matrices; `scale` is the kappa prefactor in 1/m^2.
struct Efim {
  Mat2 normalized = Mat2::Zero();
  double scale = 1.0;
  bool psd = true;

  Mat2 matrix() const { return scale * normalized; }
};

struct CrbResult {
  double value = kInf;
  double min_eigenvalue = 0.0;
  bool singular = true;
};

CrbResult crb(const Mat2& j);
CrbResult crb(const Efim& j);

// Per-BS SNR of MS i: sum over covariances k and slots of gain / noise.
std::vector<double> link_snr(const CovarianceSet& cov, const GainTable& gains, double noise, int i);

// sum_j snr_j D_j
Mat2 toa_combination(const std::vector<double>& snr, const std::vector<Mat2>& direction);
// (K_b sum_m snr_m D_m + sum_{j<l} snr_j snr_l P_jl) / (sum snr + K_b); pair(j, l) gives P_jl.
template <typename PairFn>
Mat2 tdoa_combination(const std::vector<double>& snr, const std::vector<Mat2>& direction, PairFn pair,
                      double clock_prior) {
  const int n = static_cast<int>(snr.size());
  double total = clock_prior;
  Mat2 acc = Mat2::Zero();
  for (int m = 0; m < n; ++m) {
    total += snr[m];
    acc += clock_prior * snr[m] * direction[m];
  }
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) acc += snr[j] * snr[l] * pair(j, l);
  }
  return acc / total;
}

Efim efim_toa_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                   const scene::Topology& topology, const scene::SystemParams& params, int ms);
Efim efim_tdoa_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                    const scene::Topology& topology, const scene::SystemParams& params, int ms,
                    double clock_prior);
// Same EFIM written as J_TOA - kappa v v^T / (sum SNR + K_b).
Efim efim_tdoa_flat_difference(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                               const scene::Topology& topology, const scene::SystemParams& params, int ms,
                               double clock_prior);
Efim efim_tdoa_lower_bound(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                           const scene::Topology& topology, const scene::SystemParams& params, int ms,
                           double clock_prior);

enum class RobustMode { kToa, kTdoa };

Efim efim_robust(const CovarianceSet& cov, const channel::ChannelStats& stats,
                 const scene::UncertaintyModel& uncertainty, const scene::SystemParams& params, int ms,
                 RobustMode mode, double clock_prior = 0.0);

Efim efim_toa_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                   const scene::Topology& topology, const scene::SystemParams& params, int ms);

}  // namespace locbeam::fim
