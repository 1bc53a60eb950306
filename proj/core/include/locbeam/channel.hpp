// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "locbeam/scene.hpp"
#include "locbeam/types.hpp"

namespace locbeam::channel {

// Uniform linear array response, entry m = exp(i pi m cos(angle)).
CVector steering_vector(double angle, int antennas);

struct FlatChannelSet {
  int n_bs = 0;
  int n_ms = 0;
  std::vector<CVector> h;
  std::vector<double> zeta;

  const CVector& at(int j, int i) const { return h.at(j * n_ms + i); }
  double zeta_at(int j, int i) const { return zeta.at(j * n_ms + i); }
};

FlatChannelSet flat_channels(const scene::Topology& topology, const scene::SystemParams& params);

struct SelectiveChannelSet {
  int n_bs = 0;
  int n_ms = 0;
  std::vector<CMatrix> h;  // M_j x L_i, one column per path
  std::vector<double> zeta;

  const CMatrix& at(int j, int i) const { return h.at(j * n_ms + i); }
  double zeta_at(int j, int i) const { return zeta.at(j * n_ms + i); }
};

struct SelectiveOptions {
  double decay_rate = 1.0;
  double angle_spread_deg = 10.0;
  std::uint64_t seed = 1;
};

SelectiveChannelSet selective_channels(const scene::Topology& topology, const scene::SystemParams& params,
                                       const SelectiveOptions& options);

struct ChannelStats {
  int n_bs = 0;
  int n_ms = 0;
  std::vector<CMatrix> r;

  const CMatrix& at(int j, int i) const { return r.at(j * n_ms + i); }
};

// Midpoint-rule average of s(phi) s(phi)^H over [angle - halfwidth, angle + halfwidth].
CMatrix angular_covariance(double angle, double halfwidth, int antennas, int n_samples);

ChannelStats robust_stats(const scene::Topology& topology, const scene::UncertaintyModel& uncertainty,
                          int n_samples = 1001);

// zeta^2 h^H Sigma h.
double effective_gain(const CMatrix& sigma, const CVector& h, double zeta);
// Re tr(W Sigma) for a Hermitian weight W, e.g. zeta^2 R in the statistical mode.
double effective_gain(const CMatrix& sigma, const CMatrix& weight);

void to_json(nlohmann::json& j, const FlatChannelSet& c);
void from_json(const nlohmann::json& j, FlatChannelSet& c);
void to_json(nlohmann::json& j, const SelectiveChannelSet& c);
void from_json(const nlohmann::json& j, SelectiveChannelSet& c);

}  // namespace locbeam::channel
