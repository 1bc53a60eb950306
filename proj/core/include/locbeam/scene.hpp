// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "locbeam/types.hpp"

namespace locbeam::scene {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

struct Polar {
  double distance = 0.0;
  double angle = 0.0;
};

// Distance and angle of the MS seen from the BS; angle in (-pi, pi].
Polar distance_and_angle(const Position& bs, const Position& ms);

// Amplitude path loss (1 + (d/ref)^eta)^(-1/2).
double path_loss(double distance, double reference_distance, double exponent);

// Reference distance for which the power loss at `at_distance` equals the target (dB, negative).
double calibrate_reference_distance(double target_power_loss_db, double at_distance, double exponent);

struct Topology {
  double region_side = 200.0;
  std::vector<Position> bs;
  std::vector<Position> ms;
  std::vector<int> bs_antennas;

  int n_bs() const { return static_cast<int>(bs.size()); }
  int n_ms() const { return static_cast<int>(ms.size()); }
  int antennas(int j) const { return bs_antennas.at(j); }
  Polar link(int j, int i) const { return distance_and_angle(bs.at(j), ms.at(i)); }

  // Throws LocalizabilityError for fewer than three BSs and DegenerateGeometry for
  // coincident BS/MS pairs.
  void validate() const;
};

enum class Placement { kCorners, kUniform, kLineScene };

struct PlacementOptions {
  Placement kind = Placement::kCorners;
  int antennas = 4;
  // MS 2 offset along x from the center, as a fraction of the region side (line scene).
  double line_offset = 0.3;
};

Topology random_topology(std::uint64_t seed, double region_side, int n_bs, int n_ms,
                         const PlacementOptions& options);

struct SystemParams {
  double pilot_symbols = 10.0;
  double bandwidth_hz = 200e3;
  double speed = kSpeedOfLight;
  double noise_w = 7.943282347242789e-16;  // -121 dBm
  double duty = 2.0 / 3.0;
  double pathloss_exponent = 4.0;
  double reference_distance = 0.0;
  std::vector<double> clock_prior;

  int subcarriers = 32;
  int blocks = 1;
  double sampling_period_s = 5e-6;
  std::vector<int> paths;
  double data_symbols = 6.0;

  double flat_scale() const;
  double ofdm_scale() const;
  double clock_prior_for(int ms) const;
  int paths_for(int ms) const;
  int block_size() const { return subcarriers / blocks; }
  void validate(bool ofdm = false) const;
};

// Parameters of the flat-channel numerical set-up: -110 dB at 100 m, eta = 4.
SystemParams default_params();

struct Requirements {
  std::vector<double> rate;
  std::vector<double> accuracy;

  static Requirements broadcast(int n_ms, double rate, double accuracy);
  int n_ms() const { return static_cast<int>(rate.size()); }
  bool has_rate(int i) const { return rate.at(i) > 0.0; }
  bool has_accuracy(int i) const;
  void validate(int n_ms) const;
};

struct LinkUncertainty {
  double nominal_distance = 0.0;
  double nominal_angle = 0.0;
  double distance_halfwidth = 0.0;
  double angle_halfwidth = 0.0;
  double zeta_lower = 0.0;
  double zeta_upper = 0.0;
};

struct UncertaintyModel {
  int n_bs = 0;
  int n_ms = 0;
  std::vector<LinkUncertainty> links;

  const LinkUncertainty& at(int j, int i) const { return links.at(j * n_ms + i); }
  void validate() const;
};

UncertaintyModel make_uncertainty(const Topology& topology, const SystemParams& params,
                                  double distance_halfwidth, double angle_halfwidth);

}  // namespace locbeam::scene
