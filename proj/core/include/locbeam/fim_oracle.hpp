// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "locbeam/channel.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/scene.hpp"

namespace locbeam::fim {

enum class FlatMode { kToa, kTdoa };

// Full Fisher information over (position, [clock offset], channel amplitudes) and its Schur
// complement onto the position. Channel amplitudes are built from an eigen-factorization of each
// covariance, one amplitude per stream.
struct FullFim {
  Matrix full;
  Matrix a;
  Matrix b;
  Matrix c;
  Efim efim;
};

FullFim oracle_full_fim_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                             const scene::Topology& topology, const scene::SystemParams& params, int ms,
                             FlatMode mode, double clock_prior = 0.0);

FullFim oracle_full_fim_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                             const scene::Topology& topology, const scene::SystemParams& params, int ms);

}  // namespace locbeam::fim
