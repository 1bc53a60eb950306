// SPDX-License-Identifier: Apache-2.0
#include "locbeam/fim.hpp"

#include <cassert>
#include <cmath>

#include "locbeam/error.hpp"

namespace locbeam::fim {

Vec2 direction(double angle) { return Vec2(std::cos(angle), std::sin(angle)); }

Mat2 j_phi(double angle) {
  const Vec2 q = direction(angle);
  return q * q.transpose();
}

Mat2 j_phi_pair(double angle, double other) {
  const Vec2 d = direction(angle) - direction(other);
  return d * d.transpose();
}

Mat2 q_phi_toa(double angle_hat, double halfwidth) {
  if (!(halfwidth >= 0.0 && halfwidth < kPi / 2.0)) throw InvalidArgument("angle half-width out of range");
  return j_phi(angle_hat) - std::sin(halfwidth) * Mat2::Identity();
}

Mat2 q_phi_tdoa(double angle_hat, double other_hat, double halfwidth, double other_halfwidth) {
  if (!(halfwidth >= 0.0 && halfwidth < kPi / 2.0) || !(other_halfwidth >= 0.0 && other_halfwidth < kPi / 2.0)) {
    throw InvalidArgument("angle half-width out of range");
  }
  const double shift = std::sin(halfwidth) + std::sin(other_halfwidth) +
                       4.0 * std::sin((halfwidth + other_halfwidth) / 2.0);
  return j_phi_pair(angle_hat, other_hat) - shift * Mat2::Identity();
}

CrbResult crb(const Mat2& j) {
  CrbResult r;
  const Mat2 s = (j + j.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Mat2> es(s, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues()(0);
  const double norm_inf = s.cwiseAbs().rowwise().sum().maxCoeff();
  const double threshold = 1e-12 * std::max(1.0, norm_inf);
  if (!(r.min_eigenvalue > threshold)) return r;
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  r.value = (s(0, 0) + s(1, 1)) / det;
  r.singular = false;
  return r;
}

CrbResult crb(const Efim& j) { return crb(j.matrix()); }

std::vector<double> link_snr(const CovarianceSet& cov, const GainTable& gains, double noise, int i) {
  if (cov.n_bs() != gains.n_bs || cov.n_ms() != gains.n_ms) {
    throw DimensionMismatch("covariance set and channel set differ in shape");
  }
  std::vector<double> snr(gains.n_bs, 0.0);
  for (int j = 0; j < gains.n_bs; ++j) {
    for (int s = 0; s < gains.n_slots; ++s) snr[j] += gains.total_gain(cov, j, i, s);
    snr[j] /= noise;
  }
  return snr;
}

Mat2 toa_combination(const std::vector<double>& snr, const std::vector<Mat2>& direction) {
  Mat2 acc = Mat2::Zero();
  for (std::size_t j = 0; j < snr.size(); ++j) acc += snr[j] * direction[j];
  return acc;
}

namespace {

std::vector<double> link_angles(const scene::Topology& topology, int ms) {
  std::vector<double> a;
  for (int j = 0; j < topology.n_bs(); ++j) a.push_back(topology.link(j, ms).angle);
  return a;
}

std::vector<Mat2> direction_matrices(const std::vector<double>& angles) {
  std::vector<Mat2> d;
  for (double a : angles) d.push_back(j_phi(a));
  return d;
}

void check_shapes(const CovarianceSet& cov, int n_bs, int n_ms, int ms) {
  if (cov.n_bs() != n_bs || cov.n_ms() != n_ms) throw DimensionMismatch("covariance set shape");
  if (ms < 0 || ms >= n_ms) throw InvalidArgument("MS index out of range");
}

Mat2 tdoa_normalized(const std::vector<double>& snr, const std::vector<double>& angles, double clock_prior) {
  double total = clock_prior;
  for (double s : snr) total += s;
  if (!(total > 0.0)) throw DegenerateInput("TDOA EFIM undefined for zero SNR and zero clock prior");
  return tdoa_combination(
      snr, direction_matrices(angles), [&](int j, int l) { return j_phi_pair(angles[j], angles[l]); },
      clock_prior);
}

Mat2 tdoa_difference_normalized(const std::vector<double>& snr, const std::vector<double>& angles,
                                double clock_prior) {
  // The subtraction cancels most of both terms; accumulate in extended precision.
  long double total = clock_prior, vx = 0, vy = 0, xx = 0, xy = 0, yy = 0;
  for (std::size_t j = 0; j < snr.size(); ++j) {
    const long double s = snr[j], c = std::cos(static_cast<long double>(angles[j])),
                      n = std::sin(static_cast<long double>(angles[j]));
    total += s;
    vx += s * c;
    vy += s * n;
    xx += s * c * c;
    xy += s * c * n;
    yy += s * n * n;
  }
  if (!(total > 0.0L)) throw DegenerateInput("TDOA EFIM undefined for zero SNR and zero clock prior");
  Mat2 out;
  out(0, 0) = static_cast<double>(xx - vx * vx / total);
  out(0, 1) = out(1, 0) = static_cast<double>(xy - vx * vy / total);
  out(1, 1) = static_cast<double>(yy - vy * vy / total);
  return out;
}

}  // namespace

Efim efim_toa_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                   const scene::Topology& topology, const scene::SystemParams& params, int ms) {
  check_shapes(cov, channels.n_bs, channels.n_ms, ms);
  const auto snr = link_snr(cov, flat_gains(channels), params.noise_w, ms);
  Efim e;
  e.scale = params.flat_scale();
  e.normalized = toa_combination(snr, direction_matrices(link_angles(topology, ms)));
  return e;
}

Efim efim_tdoa_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                    const scene::Topology& topology, const scene::SystemParams& params, int ms,
                    double clock_prior) {
  check_shapes(cov, channels.n_bs, channels.n_ms, ms);
  if (!(clock_prior >= 0.0)) throw InvalidArgument("clock prior must be non-negative");
  const auto snr = link_snr(cov, flat_gains(channels), params.noise_w, ms);
  const auto angles = link_angles(topology, ms);
  Efim e;
  e.scale = params.flat_scale();
  e.normalized = tdoa_normalized(snr, angles, clock_prior);
#ifndef NDEBUG
  const Mat2 alt = tdoa_difference_normalized(snr, angles, clock_prior);
  assert((alt - e.normalized).norm() <= 1e-9 * std::max(1.0, e.normalized.norm()));
#endif
  return e;
}

Efim efim_tdoa_flat_difference(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                               const scene::Topology& topology, const scene::SystemParams& params, int ms,
                               double clock_prior) {
  check_shapes(cov, channels.n_bs, channels.n_ms, ms);
  if (!(clock_prior >= 0.0)) throw InvalidArgument("clock prior must be non-negative");
  const auto snr = link_snr(cov, flat_gains(channels), params.noise_w, ms);
  Efim e;
  e.scale = params.flat_scale();
  e.normalized = tdoa_difference_normalized(snr, link_angles(topology, ms), clock_prior);
  return e;
}

Efim efim_tdoa_lower_bound(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                           const scene::Topology& topology, const scene::SystemParams& params, int ms,
                           double clock_prior) {
  if (!(clock_prior > 0.0)) throw InvalidArgument("TDOA lower bound needs a positive clock prior");
  Efim e = efim_toa_flat(cov, channels, topology, params, ms);
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < channels.n_bs; ++j) {
    const double z = channels.zeta_at(j, ms);
    v += z * z * channels.at(j, ms).squaredNorm() / params.noise_w * direction(topology.link(j, ms).angle);
  }
  const double n_ms = channels.n_ms;
  const Mat2 correction = n_ms * n_ms / clock_prior * v * v.transpose();
  e.normalized -= (correction + correction.transpose()) / 2.0;
  return e;
}

Efim efim_robust(const CovarianceSet& cov, const channel::ChannelStats& stats,
                 const scene::UncertaintyModel& uncertainty, const scene::SystemParams& params, int ms,
                 RobustMode mode, double clock_prior) {
  check_shapes(cov, stats.n_bs, stats.n_ms, ms);
  uncertainty.validate();
  const auto snr = link_snr(cov, robust_gains(stats, uncertainty), params.noise_w, ms);
  std::vector<Mat2> q;
  for (int j = 0; j < stats.n_bs; ++j) {
    const auto& l = uncertainty.at(j, ms);
    q.push_back(q_phi_toa(l.nominal_angle, l.angle_halfwidth));
  }
  Efim e;
  e.scale = params.flat_scale();
  if (mode == RobustMode::kToa) {
    e.normalized = toa_combination(snr, q);
  } else {
    double total = clock_prior;
    for (double s : snr) total += s;
    if (!(total > 0.0)) throw DegenerateInput("TDOA EFIM undefined for zero SNR and zero clock prior");
    e.normalized = tdoa_combination(
        snr, q,
        [&](int j, int l) {
          const auto& a = uncertainty.at(j, ms);
          const auto& b = uncertainty.at(l, ms);
          return q_phi_tdoa(a.nominal_angle, b.nominal_angle, a.angle_halfwidth, b.angle_halfwidth);
        },
        clock_prior);
  }
  Eigen::SelfAdjointEigenSolver<Mat2> es(e.normalized, Eigen::EigenvaluesOnly);
  e.psd = es.eigenvalues()(0) >= -1e-12 * std::max(1.0, e.normalized.norm());
  return e;
}

Efim efim_toa_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                   const scene::Topology& topology, const scene::SystemParams& params, int ms) {
  check_shapes(cov, channels.n_bs, channels.n_ms, ms);
  if (cov.n_blocks() != params.blocks) throw DimensionMismatch("covariance blocks differ from N_C");
  const auto snr = link_snr(cov, ofdm_localization_gains(channels, params), params.noise_w, ms);
  Efim e;
  e.scale = params.ofdm_scale();
  e.normalized = toa_combination(snr, direction_matrices(link_angles(topology, ms)));
  return e;
}

}  // namespace locbeam::fim
