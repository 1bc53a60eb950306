// SPDX-License-Identifier: Apache-2.0
#include "locbeam/scene.hpp"

#include <cmath>
#include <random>
#include <string>

#include "locbeam/error.hpp"
#include "locbeam/units.hpp"

namespace locbeam::scene {

Polar distance_and_angle(const Position& bs, const Position& ms) {
  const double dx = ms.x - bs.x;
  const double dy = ms.y - bs.y;
  const double d = std::hypot(dx, dy);
  if (!(d > 0.0)) throw DegenerateGeometry("BS and MS positions coincide");
  double phi = std::atan2(dy, dx);
  if (phi <= -kPi) phi += 2.0 * kPi;
  return {d, phi};
}

double path_loss(double distance, double reference_distance, double exponent) {
  if (distance < 0.0 || !(reference_distance > 0.0) || !(exponent > 0.0)) {
    throw InvalidArgument("path_loss: requires d >= 0, reference > 0, exponent > 0");
  }
  return 1.0 / std::sqrt(1.0 + std::pow(distance / reference_distance, exponent));
}

double calibrate_reference_distance(double target_power_loss_db, double at_distance, double exponent) {
  if (!(target_power_loss_db < 0.0)) {
    throw InvalidCalibration("calibration target must be a loss below 0 dB");
  }
  if (!(at_distance > 0.0) || !(exponent > 0.0)) {
    throw InvalidCalibration("calibration distance and exponent must be positive");
  }
  // zeta^2 = 1 / (1 + (d/ref)^eta) = g  =>  (d/ref)^eta = 1/g - 1 = expm1(-ln g)
  const double ln_g = target_power_loss_db / 10.0 * std::log(10.0);
  const double ratio = std::expm1(-ln_g);
  return at_distance / std::pow(ratio, 1.0 / exponent);
}

void Topology::validate() const {
  if (n_bs() < 3) throw LocalizabilityError("at least three BSs are required for localization");
  if (n_ms() < 1) throw InvalidArgument("topology has no MS");
  if (static_cast<int>(bs_antennas.size()) != n_bs()) {
    throw DimensionMismatch("bs_antennas must have one entry per BS");
  }
  for (int m : bs_antennas) {
    if (m < 1) throw InvalidArgument("antenna counts must be positive");
  }
  for (const auto& b : bs) {
    for (const auto& u : ms) distance_and_angle(b, u);
  }
}

namespace {

std::vector<Position> corner_positions(double side) {
  return {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}};
}

bool too_close(const std::vector<Position>& bs, const Position& p, double min_dist) {
  for (const auto& b : bs) {
    if (std::hypot(b.x - p.x, b.y - p.y) < min_dist) return true;
  }
  return false;
}

}  // namespace

Topology random_topology(std::uint64_t seed, double region_side, int n_bs, int n_ms,
                         const PlacementOptions& options) {
  if (n_bs < 3) throw LocalizabilityError("at least three BSs are required for localization");
  if (n_ms < 1) throw InvalidArgument("at least one MS is required");
  if (!(region_side > 0.0)) throw InvalidArgument("region side must be positive");

  // Nested layouts: the first k BSs (MSs) do not depend on n_bs (n_ms).
  std::mt19937_64 bs_rng(seed);
  std::seed_seq ms_seq{seed & 0xffffffffu, seed >> 32, std::uint64_t{0x6d73}};
  std::mt19937_64 ms_rng(ms_seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](std::mt19937_64& rng) { return Position{region_side * unit(rng), region_side * unit(rng)}; };

  Topology t;
  t.region_side = region_side;
  t.bs_antennas.assign(n_bs, options.antennas);

  if (options.kind == Placement::kUniform) {
    for (int j = 0; j < n_bs; ++j) t.bs.push_back(draw(bs_rng));
  } else {
    if (n_bs != 4) throw InvalidArgument("corner placement uses exactly four BSs");
    t.bs = corner_positions(region_side);
  }

  const double min_dist = 1e-3 * region_side;
  if (options.kind == Placement::kLineScene) {
    if (n_ms > 2) throw InvalidArgument("line scene holds at most two MSs");
    const Position center{region_side / 2.0, region_side / 2.0};
    t.ms.push_back(center);
    if (n_ms == 2) t.ms.push_back({center.x + options.line_offset * region_side, center.y});
  } else {
    for (int i = 0; i < n_ms; ++i) {
      Position p = draw(ms_rng);
      while (too_close(t.bs, p, min_dist)) p = draw(ms_rng);
      t.ms.push_back(p);
    }
  }
  t.validate();
  return t;
}

double SystemParams::flat_scale() const {
  return 8.0 * kPi * kPi * pilot_symbols * bandwidth_hz * bandwidth_hz / (speed * speed);
}

double SystemParams::ofdm_scale() const {
  return 8.0 * kPi * kPi / (speed * speed * sampling_period_s * sampling_period_s);
}

double SystemParams::clock_prior_for(int ms) const {
  if (clock_prior.empty()) return 0.0;
  if (clock_prior.size() == 1) return clock_prior[0];
  return clock_prior.at(ms);
}

int SystemParams::paths_for(int ms) const {
  if (paths.empty()) return 1;
  if (paths.size() == 1) return paths[0];
  return paths.at(ms);
}

void SystemParams::validate(bool ofdm) const {
  if (!(pilot_symbols >= 1.0)) throw InvalidArgument("n_p must be at least 1");
  if (!(bandwidth_hz > 0.0)) throw InvalidArgument("beta must be positive");
  if (!(speed > 0.0)) throw InvalidArgument("propagation speed must be positive");
  if (!(noise_w > 0.0)) throw InvalidArgument("N0 must be positive");
  if (!(duty > 0.0 && duty <= 1.0)) throw InvalidArgument("duty must lie in (0, 1]");
  if (!(pathloss_exponent > 0.0)) throw InvalidArgument("path-loss exponent must be positive");
  if (!(reference_distance > 0.0)) throw InvalidArgument("reference distance must be positive");
  for (double k : clock_prior) {
    if (!(k >= 0.0)) throw InvalidArgument("clock prior K_b must be non-negative");
  }
  if (ofdm) {
    if (subcarriers < 1 || blocks < 1) throw InvalidArgument("N and N_C must be positive");
    if (subcarriers % blocks != 0) throw InvalidArgument("N must be divisible by N_C");
    if (!(sampling_period_s > 0.0)) throw InvalidArgument("T_s must be positive");
    if (!(data_symbols > 0.0)) throw InvalidArgument("T_d must be positive");
    for (int l : paths) {
      if (l < 1) throw InvalidArgument("path counts must be positive");
    }
  }
}

SystemParams default_params() {
  SystemParams p;
  p.noise_w = dbm_to_watts(-121.0);
  p.reference_distance = calibrate_reference_distance(-110.0, 100.0, 4.0);
  return p;
}

Requirements Requirements::broadcast(int n_ms, double rate_value, double accuracy_value) {
  Requirements r;
  r.rate.assign(n_ms, rate_value);
  r.accuracy.assign(n_ms, accuracy_value);
  return r;
}

bool Requirements::has_accuracy(int i) const { return std::isfinite(accuracy.at(i)); }

void Requirements::validate(int n_ms) const {
  if (static_cast<int>(rate.size()) != n_ms || static_cast<int>(accuracy.size()) != n_ms) {
    throw DimensionMismatch("requirements must have one entry per MS");
  }
  for (double r : rate) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("rate requirement must be finite and >= 0");
  }
  for (double q : accuracy) {
    if (!(q > 0.0)) throw InvalidArgument("accuracy requirement must be positive");
  }
}

void UncertaintyModel::validate() const {
  if (static_cast<int>(links.size()) != n_bs * n_ms) throw DimensionMismatch("uncertainty link count");
  for (const auto& l : links) {
    if (!(l.distance_halfwidth >= 0.0) || !(l.nominal_distance - l.distance_halfwidth > 0.0)) {
      throw InvalidArgument("distance uncertainty must keep the distance positive");
    }
    if (!(l.angle_halfwidth >= 0.0 && l.angle_halfwidth < kPi / 2.0)) {
      throw InvalidArgument("angle uncertainty must lie in [0, pi/2)");
    }
    if (!(l.zeta_lower <= l.zeta_upper)) throw InvalidArgument("path-loss bounds out of order");
  }
}

UncertaintyModel make_uncertainty(const Topology& topology, const SystemParams& params,
                                  double distance_halfwidth, double angle_halfwidth) {
  UncertaintyModel u;
  u.n_bs = topology.n_bs();
  u.n_ms = topology.n_ms();
  for (int j = 0; j < u.n_bs; ++j) {
    for (int i = 0; i < u.n_ms; ++i) {
      const Polar p = topology.link(j, i);
      LinkUncertainty l;
      l.nominal_distance = p.distance;
      l.nominal_angle = p.angle;
      l.distance_halfwidth = distance_halfwidth;
      l.angle_halfwidth = angle_halfwidth;
      if (!(p.distance - distance_halfwidth > 0.0)) {
        throw InvalidArgument("distance uncertainty exceeds the nominal distance");
      }
      l.zeta_lower = path_loss(p.distance + distance_halfwidth, params.reference_distance,
                               params.pathloss_exponent);
      l.zeta_upper = path_loss(p.distance - distance_halfwidth, params.reference_distance,
                               params.pathloss_exponent);
      u.links.push_back(l);
    }
  }
  u.validate();
  return u;
}

}  // namespace locbeam::scene
