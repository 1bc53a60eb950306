// SPDX-License-Identifier: Apache-2.0
#include "locbeam/channel.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "locbeam/error.hpp"

namespace locbeam::channel {

CVector steering_vector(double angle, int antennas) {
  if (antennas < 1) throw InvalidArgument("steering vector needs at least one antenna");
  CVector s(antennas);
  const double c = std::cos(angle);
  for (int m = 0; m < antennas; ++m) s(m) = std::polar(1.0, kPi * m * c);
  return s;
}

FlatChannelSet flat_channels(const scene::Topology& topology, const scene::SystemParams& params) {
  topology.validate();
  FlatChannelSet out;
  out.n_bs = topology.n_bs();
  out.n_ms = topology.n_ms();
  for (int j = 0; j < out.n_bs; ++j) {
    for (int i = 0; i < out.n_ms; ++i) {
      const scene::Polar p = topology.link(j, i);
      out.h.push_back(steering_vector(p.angle, topology.antennas(j)));
      out.zeta.push_back(scene::path_loss(p.distance, params.reference_distance, params.pathloss_exponent));
    }
  }
  return out;
}

SelectiveChannelSet selective_channels(const scene::Topology& topology, const scene::SystemParams& params,
                                       const SelectiveOptions& options) {
  topology.validate();
  if (!(options.decay_rate >= 0.0)) throw InvalidArgument("decay rate must be non-negative");
  if (!(options.angle_spread_deg >= 0.0)) throw InvalidArgument("angle spread must be non-negative");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double spread = options.angle_spread_deg * kPi / 180.0;

  SelectiveChannelSet out;
  out.n_bs = topology.n_bs();
  out.n_ms = topology.n_ms();
  for (int j = 0; j < out.n_bs; ++j) {
    for (int i = 0; i < out.n_ms; ++i) {
      const int paths = params.paths_for(i);
      if (paths < 1) throw InvalidArgument("each MS needs at least one path");
      std::vector<double> profile(paths);
      double total = 0.0;
      for (int l = 0; l < paths; ++l) {
        profile[l] = std::exp(-options.decay_rate * l);
        total += profile[l];
      }
      const scene::Polar p = topology.link(j, i);
      const int m = topology.antennas(j);
      CMatrix h(m, paths);
      for (int l = 0; l < paths; ++l) {
        std::normal_distribution<double> normal(0.0, std::sqrt(profile[l] / total / 2.0));
        const double re = normal(rng);
        const double im = normal(rng);
        const double offset = spread * unit(rng);
        h.col(l) = std::hypot(re, im) * steering_vector(p.angle + offset, m);
      }
      out.h.push_back(std::move(h));
      out.zeta.push_back(scene::path_loss(p.distance, params.reference_distance, params.pathloss_exponent));
    }
  }
  return out;
}

CMatrix angular_covariance(double angle, double halfwidth, int antennas, int n_samples) {
  if (n_samples < 1) throw InvalidArgument("angular covariance needs at least one sample");
  if (!(halfwidth >= 0.0)) throw InvalidArgument("angular half-width must be non-negative");
  CMatrix r = CMatrix::Zero(antennas, antennas);
  for (int k = 0; k < n_samples; ++k) {
    const double phi = angle - halfwidth + (2.0 * k + 1.0) * halfwidth / n_samples;
    const CVector s = steering_vector(phi, antennas);
    r.noalias() += s * s.adjoint();
  }
  r /= static_cast<double>(n_samples);
  return (r + r.adjoint()) / 2.0;
}

ChannelStats robust_stats(const scene::Topology& topology, const scene::UncertaintyModel& uncertainty,
                          int n_samples) {
  ChannelStats out;
  out.n_bs = topology.n_bs();
  out.n_ms = topology.n_ms();
  if (uncertainty.n_bs != out.n_bs || uncertainty.n_ms != out.n_ms) {
    throw DimensionMismatch("uncertainty model does not match topology");
  }
  for (int j = 0; j < out.n_bs; ++j) {
    for (int i = 0; i < out.n_ms; ++i) {
      const auto& l = uncertainty.at(j, i);
      out.r.push_back(angular_covariance(l.nominal_angle, l.angle_halfwidth, topology.antennas(j), n_samples));
    }
  }
  return out;
}

namespace {

double clamp_gain(double value, double scale) {
  if (value >= 0.0) return value;
  if (value >= -1e-10 * scale) return 0.0;
  throw InvalidArgument("quadratic form is negative: covariance is not positive semidefinite");
}

}  // namespace

double effective_gain(const CMatrix& sigma, const CVector& h, double zeta) {
  if (sigma.rows() != h.size() || sigma.cols() != h.size()) {
    throw DimensionMismatch("effective_gain: covariance and channel sizes differ");
  }
  const double value = zeta * zeta * h.dot(sigma * h).real();
  return clamp_gain(value, zeta * zeta * h.squaredNorm() * sigma.norm());
}

double effective_gain(const CMatrix& sigma, const CMatrix& weight) {
  if (sigma.rows() != weight.rows() || sigma.cols() != weight.cols()) {
    throw DimensionMismatch("effective_gain: covariance and weight sizes differ");
  }
  const double value = (weight.cwiseProduct(sigma.transpose())).sum().real();
  return clamp_gain(value, weight.norm() * sigma.norm());
}

namespace {

nlohmann::json complex_vector_json(const CVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v(k).real(), v(k).imag()});
  return a;
}

CVector complex_vector_from(const nlohmann::json& a) {
  CVector v(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) v(k) = Complex(a[k].at(0).get<double>(), a[k].at(1).get<double>());
  return v;
}

}  // namespace

void to_json(nlohmann::json& j, const FlatChannelSet& c) {
  j = nlohmann::json{{"n_bs", c.n_bs}, {"n_ms", c.n_ms}, {"zeta", c.zeta}};
  nlohmann::json h = nlohmann::json::array();
  for (const auto& v : c.h) h.push_back(complex_vector_json(v));
  j["h"] = h;
}

void from_json(const nlohmann::json& j, FlatChannelSet& c) {
  c.n_bs = j.at("n_bs").get<int>();
  c.n_ms = j.at("n_ms").get<int>();
  c.zeta = j.at("zeta").get<std::vector<double>>();
  c.h.clear();
  for (const auto& v : j.at("h")) c.h.push_back(complex_vector_from(v));
  if (static_cast<int>(c.h.size()) != c.n_bs * c.n_ms || c.zeta.size() != c.h.size()) {
    throw DimensionMismatch("flat channel JSON has inconsistent sizes");
  }
}

void to_json(nlohmann::json& j, const SelectiveChannelSet& c) {
  j = nlohmann::json{{"n_bs", c.n_bs}, {"n_ms", c.n_ms}, {"zeta", c.zeta}};
  nlohmann::json h = nlohmann::json::array();
  for (const auto& m : c.h) {
    nlohmann::json cols = nlohmann::json::array();
    for (Eigen::Index l = 0; l < m.cols(); ++l) cols.push_back(complex_vector_json(m.col(l)));
    h.push_back(cols);
  }
  j["h"] = h;
}

void from_json(const nlohmann::json& j, SelectiveChannelSet& c) {
  c.n_bs = j.at("n_bs").get<int>();
  c.n_ms = j.at("n_ms").get<int>();
  c.zeta = j.at("zeta").get<std::vector<double>>();
  c.h.clear();
  for (const auto& cols : j.at("h")) {
    if (cols.empty()) throw InvalidArgument("selective channel needs at least one path");
    const CVector first = complex_vector_from(cols[0]);
    CMatrix m(first.size(), cols.size());
    for (std::size_t l = 0; l < cols.size(); ++l) m.col(l) = complex_vector_from(cols[l]);
    c.h.push_back(std::move(m));
  }
  if (static_cast<int>(c.h.size()) != c.n_bs * c.n_ms || c.zeta.size() != c.h.size()) {
    throw DimensionMismatch("selective channel JSON has inconsistent sizes");
  }
}

}  // namespace locbeam::channel
