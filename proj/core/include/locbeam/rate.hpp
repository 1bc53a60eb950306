// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "locbeam/channel.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/gains.hpp"
#include "locbeam/scene.hpp"

namespace locbeam::rate {

struct RateReport {
  int n_bs = 0;
  int n_ms = 0;
  int n_slots = 1;
  std::vector<double> link;   // (j, i)
  std::vector<double> total;  // per MS
  std::vector<double> sinr;   // (j, i, slot)

  double link_rate(int j, int i) const { return link.at(j * n_ms + i); }
  double sinr_at(int j, int i, int s = 0) const { return sinr.at((j * n_ms + i) * n_slots + s); }
};

double sinr(const CovarianceSet& cov, const GainTable& gains, int j, int i, int slot, double noise);
RateReport evaluate(const CovarianceSet& cov, const GainTable& gains, double noise, double prefactor);

double sinr_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels, int j, int i, double noise);
RateReport rate_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                     const scene::Topology& topology, const scene::SystemParams& params);
// Rates with statistical gains at the worst-case path loss.
RateReport rate_robust(const CovarianceSet& cov, const channel::ChannelStats& stats,
                       const scene::UncertaintyModel& uncertainty, const scene::SystemParams& params);
RateReport rate_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                     const scene::Topology& topology, const scene::SystemParams& params);

double flat_prefactor(const scene::SystemParams& params, int n_bs);
double ofdm_prefactor(const scene::SystemParams& params, int n_bs);

// Affine function constant + sum_terms Re tr(gradient * Sigma_{bs, ms, block}).
struct AffineForm {
  struct Term {
    int bs = 0;
    int ms = 0;
    int block = 0;
    CMatrix gradient;
  };
  double constant = 0.0;
  std::vector<Term> terms;

  double operator()(const CovarianceSet& cov) const;
};

// First-order expansion of log2(noise + sum_{k != i} gain_{mi,slot}(Sigma_mk)) at `expansion`.
AffineForm dc_tangent(const CovarianceSet& expansion, const GainTable& gains, int i, int m, int slot,
                      double noise);

AffineForm dc_tangent_flat(const CovarianceSet& expansion, const channel::FlatChannelSet& channels, int i, int m,
                           double noise);
double dc_tangent_flat(const CovarianceSet& next, const CovarianceSet& expansion,
                       const channel::FlatChannelSet& channels, int i, int m, double noise);

AffineForm dc_tangent_ofdm(const CovarianceSet& expansion, const channel::SelectiveChannelSet& channels,
                           const scene::SystemParams& params, int i, int m, int subcarrier_slot);
double dc_tangent_ofdm(const CovarianceSet& next, const CovarianceSet& expansion,
                       const channel::SelectiveChannelSet& channels, const scene::SystemParams& params, int i,
                       int m, int subcarrier_slot);

}  // namespace locbeam::rate
