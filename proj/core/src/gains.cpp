// SPDX-License-Identifier: Apache-2.0
#include "locbeam/gains.hpp"

#include "locbeam/error.hpp"
#include "locbeam/ofdm.hpp"

namespace locbeam {

double GainTable::gain(const CovarianceSet& cov, int j, int i, int k, int s) const {
  return channel::effective_gain(cov.at(j, k, slot_block.at(s)), at(j, i, s));
}

double GainTable::total_gain(const CovarianceSet& cov, int j, int i, int s) const {
  double g = 0.0;
  for (int k = 0; k < n_ms; ++k) g += gain(cov, j, i, k, s);
  return g;
}

double GainTable::interference(const CovarianceSet& cov, int j, int i, int s) const {
  double g = 0.0;
  for (int k = 0; k < n_ms; ++k) {
    if (k != i) g += gain(cov, j, i, k, s);
  }
  return g;
}

GainTable GainTable::scaled(double factor) const {
  GainTable t = *this;
  for (auto& w : t.weight) w *= factor;
  return t;
}

GainTable flat_gains(const channel::FlatChannelSet& channels) {
  GainTable t;
  t.n_bs = channels.n_bs;
  t.n_ms = channels.n_ms;
  t.n_slots = 1;
  t.slot_block = {0};
  for (int j = 0; j < t.n_bs; ++j) {
    for (int i = 0; i < t.n_ms; ++i) {
      const CVector& h = channels.at(j, i);
      const double z = channels.zeta_at(j, i);
      t.weight.push_back(z * z * h * h.adjoint());
    }
  }
  return t;
}

GainTable robust_gains(const channel::ChannelStats& stats, const scene::UncertaintyModel& uncertainty) {
  if (stats.n_bs != uncertainty.n_bs || stats.n_ms != uncertainty.n_ms) {
    throw DimensionMismatch("statistics and uncertainty model differ in shape");
  }
  GainTable t;
  t.n_bs = stats.n_bs;
  t.n_ms = stats.n_ms;
  t.n_slots = 1;
  t.slot_block = {0};
  for (int j = 0; j < t.n_bs; ++j) {
    for (int i = 0; i < t.n_ms; ++i) {
      const double z = uncertainty.at(j, i).zeta_lower;
      t.weight.push_back(z * z * stats.at(j, i));
    }
  }
  return t;
}

GainTable ofdm_rate_gains(const channel::SelectiveChannelSet& channels, const scene::SystemParams& params) {
  params.validate(true);
  const int n = params.subcarriers;
  const int nc = params.blocks;
  const int size = params.block_size();
  GainTable t;
  t.n_bs = channels.n_bs;
  t.n_ms = channels.n_ms;
  t.n_slots = n;
  for (int b = 1; b <= nc; ++b) {
    for (int k = 1; k <= size; ++k) t.slot_block.push_back(b - 1);
  }
  for (int j = 0; j < t.n_bs; ++j) {
    for (int i = 0; i < t.n_ms; ++i) {
      const CMatrix& h = channels.at(j, i);
      const double z = channels.zeta_at(j, i);
      for (int b = 1; b <= nc; ++b) {
        for (int k = 1; k <= size; ++k) {
          const CVector f = ofdm::subcarrier_channel(h, n, ofdm::subcarrier_index(n, nc, b, k));
          t.weight.push_back(z * z * f * f.adjoint());
        }
      }
    }
  }
  return t;
}

GainTable ofdm_localization_gains(const channel::SelectiveChannelSet& channels,
                                  const scene::SystemParams& params) {
  params.validate(true);
  const int nc = params.blocks;
  GainTable t;
  t.n_bs = channels.n_bs;
  t.n_ms = channels.n_ms;
  t.n_slots = nc;
  for (int b = 0; b < nc; ++b) t.slot_block.push_back(b);
  for (int j = 0; j < t.n_bs; ++j) {
    for (int i = 0; i < t.n_ms; ++i) {
      const CMatrix& h = channels.at(j, i);
      const double z = channels.zeta_at(j, i);
      for (int b = 1; b <= nc; ++b) {
        const CMatrix g = ofdm::delay_kernel(params.subcarriers, nc, b, static_cast<int>(h.cols()));
        CMatrix w = z * z * h * g * h.adjoint();
        t.weight.push_back((w + w.adjoint()) / 2.0);
      }
    }
  }
  return t;
}

}  // namespace locbeam
