// SPDX-License-Identifier: Apache-2.0
#include "locbeam/rate.hpp"

#include <cmath>

#include "locbeam/error.hpp"

namespace locbeam::rate {

double sinr(const CovarianceSet& cov, const GainTable& gains, int j, int i, int slot, double noise) {
  const double own = gains.gain(cov, j, i, i, slot);
  return own / (noise + gains.interference(cov, j, i, slot));
}

RateReport evaluate(const CovarianceSet& cov, const GainTable& gains, double noise, double prefactor) {
  if (cov.n_bs() != gains.n_bs || cov.n_ms() != gains.n_ms) {
    throw DimensionMismatch("covariance set and channel set differ in shape");
  }
  RateReport r;
  r.n_bs = gains.n_bs;
  r.n_ms = gains.n_ms;
  r.n_slots = gains.n_slots;
  r.total.assign(r.n_ms, 0.0);
  for (int j = 0; j < r.n_bs; ++j) {
    for (int i = 0; i < r.n_ms; ++i) {
      double acc = 0.0;
      for (int s = 0; s < r.n_slots; ++s) {
        const double value = sinr(cov, gains, j, i, s, noise);
        r.sinr.push_back(value);
        acc += std::log2(1.0 + value);
      }
      r.link.push_back(prefactor * acc);
      r.total[i] += prefactor * acc;
    }
  }
  return r;
}

double flat_prefactor(const scene::SystemParams& params, int n_bs) { return params.duty / n_bs; }

double ofdm_prefactor(const scene::SystemParams& params, int n_bs) {
  return params.data_symbols / (n_bs * (params.data_symbols + 1.0));
}

double sinr_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels, int j, int i, double noise) {
  return sinr(cov, flat_gains(channels), j, i, 0, noise);
}

RateReport rate_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                     const scene::Topology& topology, const scene::SystemParams& params) {
  (void)topology;
  return evaluate(cov, flat_gains(channels), params.noise_w, flat_prefactor(params, channels.n_bs));
}

RateReport rate_robust(const CovarianceSet& cov, const channel::ChannelStats& stats,
                       const scene::UncertaintyModel& uncertainty, const scene::SystemParams& params) {
  return evaluate(cov, robust_gains(stats, uncertainty), params.noise_w, flat_prefactor(params, stats.n_bs));
}

RateReport rate_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                     const scene::Topology& topology, const scene::SystemParams& params) {
  (void)topology;
  if (cov.n_blocks() != params.blocks) throw DimensionMismatch("covariance blocks differ from N_C");
  return evaluate(cov, ofdm_rate_gains(channels, params), params.noise_w, ofdm_prefactor(params, channels.n_bs));
}

double AffineForm::operator()(const CovarianceSet& cov) const {
  double v = constant;
  for (const Term& t : terms) {
    v += (t.gradient.cwiseProduct(cov.at(t.bs, t.ms, t.block).transpose())).sum().real();
  }
  return v;
}

AffineForm dc_tangent(const CovarianceSet& expansion, const GainTable& gains, int i, int m, int slot,
                      double noise) {
  const double base = noise + gains.interference(expansion, m, i, slot);
  const double slope = 1.0 / (kLn2 * base);
  AffineForm f;
  f.constant = std::log2(base) - (base - noise) * slope;
  for (int k = 0; k < gains.n_ms; ++k) {
    if (k == i) continue;
    f.terms.push_back({m, k, gains.slot_block.at(slot), slope * gains.at(m, i, slot)});
  }
  return f;
}

AffineForm dc_tangent_flat(const CovarianceSet& expansion, const channel::FlatChannelSet& channels, int i, int m,
                           double noise) {
  return dc_tangent(expansion, flat_gains(channels), i, m, 0, noise);
}

double dc_tangent_flat(const CovarianceSet& next, const CovarianceSet& expansion,
                       const channel::FlatChannelSet& channels, int i, int m, double noise) {
  return dc_tangent_flat(expansion, channels, i, m, noise)(next);
}

AffineForm dc_tangent_ofdm(const CovarianceSet& expansion, const channel::SelectiveChannelSet& channels,
                           const scene::SystemParams& params, int i, int m, int subcarrier_slot) {
  return dc_tangent(expansion, ofdm_rate_gains(channels, params), i, m, subcarrier_slot, params.noise_w);
}

double dc_tangent_ofdm(const CovarianceSet& next, const CovarianceSet& expansion,
                       const channel::SelectiveChannelSet& channels, const scene::SystemParams& params, int i,
                       int m, int subcarrier_slot) {
  return dc_tangent_ofdm(expansion, channels, params, i, m, subcarrier_slot)(next);
}

}  // namespace locbeam::rate
