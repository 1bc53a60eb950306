// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "locbeam/channel.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/scene.hpp"

namespace locbeam {

// Hermitian weights W_{ji,s} such that the gain of MS k's covariance at BS j, seen by MS i on
// slot s, is Re tr(W_{ji,s} Sigma_{jk,block(s)}). Slots are subcarriers for OFDM rates, blocks
// for OFDM localization, and a single slot for flat channels.
struct GainTable {
  int n_bs = 0;
  int n_ms = 0;
  int n_slots = 1;
  std::vector<int> slot_block;
  std::vector<CMatrix> weight;

  const CMatrix& at(int j, int i, int s) const { return weight.at((j * n_ms + i) * n_slots + s); }
  CMatrix& at(int j, int i, int s) { return weight.at((j * n_ms + i) * n_slots + s); }

  double gain(const CovarianceSet& cov, int j, int i, int k, int s) const;
  // Sum over k of the gains seen by MS i from BS j on slot s.
  double total_gain(const CovarianceSet& cov, int j, int i, int s) const;
  // Sum over k != i.
  double interference(const CovarianceSet& cov, int j, int i, int s) const;
  GainTable scaled(double factor) const;
};

GainTable flat_gains(const channel::FlatChannelSet& channels);
GainTable robust_gains(const channel::ChannelStats& stats, const scene::UncertaintyModel& uncertainty);
GainTable ofdm_rate_gains(const channel::SelectiveChannelSet& channels, const scene::SystemParams& params);
GainTable ofdm_localization_gains(const channel::SelectiveChannelSet& channels,
                                  const scene::SystemParams& params);

}  // namespace locbeam
