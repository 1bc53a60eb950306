// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "locbeam/channel.hpp"
#include "locbeam/ofdm.hpp"
#include "locbeam/rate.hpp"
#include "test_support.hpp"

using namespace locbeam;
using namespace locbeam::rate;

namespace {

struct Flat {
  scene::Topology t;
  scene::SystemParams p = scene::default_params();
  channel::FlatChannelSet ch;
};

Flat flat(std::uint64_t seed, int n_bs, int n_ms, int antennas) {
  Flat f;
  f.t = locbeam::testing::uniform_topology(seed, n_bs, n_ms, antennas);
  f.ch = channel::flat_channels(f.t, f.p);
  return f;
}

}  // namespace

TEST(SinrFlat, SingleMsHasNoInterference) {
  std::mt19937_64 rng(1);
  const Flat f = flat(1, 3, 1, 4);
  const auto cov = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 1);
  for (int j = 0; j < 3; ++j) {
    const CVector& h = f.ch.at(j, 0);
    const double z = f.ch.zeta_at(j, 0);
    const double expected = z * z * h.dot(cov.at(j, 0, 0) * h).real() / f.p.noise_w;
    EXPECT_NEAR(sinr_flat(cov, f.ch, j, 0, f.p.noise_w), expected, 1e-12 * expected);
  }
}

TEST(SinrFlat, ZeroCovarianceGivesZero) {
  const Flat f = flat(2, 3, 2, 2);
  const CovarianceSet cov(f.t.bs_antennas, 2);
  EXPECT_EQ(sinr_flat(cov, f.ch, 1, 1, f.p.noise_w), 0.0);
}

TEST(SinrFlat, ZeroForcingRemovesInterference) {
  const Flat f = flat(3, 3, 2, 4);
  std::mt19937_64 rng(3);
  CovarianceSet cov(f.t.bs_antennas, 2);
  for (int j = 0; j < 3; ++j) {
    const CVector& h2 = f.ch.at(j, 1);
    CVector w1 = locbeam::testing::random_cvector(rng, 4);
    w1 -= h2 * (h2.dot(w1) / h2.squaredNorm());
    const CVector w2 = locbeam::testing::random_cvector(rng, 4);
    cov.at(j, 0, 0) = w1 * w1.adjoint();
    cov.at(j, 1, 0) = w2 * w2.adjoint();
    const double z = f.ch.zeta_at(j, 1);
    const double signal = z * z * std::norm(h2.dot(w2)) / f.p.noise_w;
    EXPECT_NEAR(sinr_flat(cov, f.ch, j, 1, f.p.noise_w), signal, 1e-9 * signal);
  }
}

TEST(RateFlat, WorkedExample) {
  const Flat f = flat(4, 4, 1, 1);
  auto p = f.p;
  p.duty = 2.0 / 3.0;
  CovarianceSet cov(f.t.bs_antennas, 1);
  const double z = f.ch.zeta_at(0, 0);
  cov.at(0, 0, 0) = CMatrix::Constant(1, 1, 63.0 * p.noise_w / (z * z));
  const RateReport r = rate_flat(cov, f.ch, f.t, p);
  EXPECT_NEAR(r.sinr_at(0, 0), 63.0, 1e-9);
  EXPECT_NEAR(r.total[0], 1.0, 1e-12);
  EXPECT_NEAR(flat_prefactor(p, 4), 1.0 / 6.0, 1e-15);
}

TEST(RateFlat, ZeroCovarianceGivesZeroRates) {
  const Flat f = flat(5, 4, 3, 2);
  const RateReport r = rate_flat(CovarianceSet(f.t.bs_antennas, 3), f.ch, f.t, f.p);
  for (double x : r.total) EXPECT_EQ(x, 0.0);
}

TEST(RateFlat, MonotoneInPowerWithoutInterference) {
  std::mt19937_64 rng(6);
  const Flat f = flat(6, 3, 1, 3);
  const auto base = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 1);
  double prev = -1.0;
  for (double alpha = 0.0; alpha < 10.0; alpha += 0.5) {
    CovarianceSet cov = base;
    cov.scale(alpha);
    const double r = rate_flat(cov, f.ch, f.t, f.p).total[0];
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(RateOfdm, SinglePathMatchesFlatSinr) {
  std::mt19937_64 rng(7);
  const auto t = locbeam::testing::uniform_topology(7, 3, 2, 3);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {1};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 2);
  const RateReport r = rate_ofdm(cov, ch, t, p);
  const GainTable g = ofdm_rate_gains(ch, p);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 2; ++i) {
      for (int s = 0; s < g.n_slots; ++s) {
        const int b = g.slot_block[s];
        const CVector h = ch.at(j, i).col(0);
        const double z = ch.zeta_at(j, i);
        double interference = p.noise_w;
        for (int k = 0; k < 2; ++k) {
          if (k != i) interference += z * z * h.dot(cov.at(j, k, b) * h).real();
        }
        const double expected = z * z * h.dot(cov.at(j, i, b) * h).real() / interference;
        EXPECT_NEAR(r.sinr_at(j, i, s), expected, 1e-9 * expected);
      }
    }
  }
}

TEST(RateOfdm, ZeroCovarianceGivesZero) {
  const auto t = locbeam::testing::uniform_topology(8, 3, 1, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {2};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const RateReport r = rate_ofdm(CovarianceSet(t.bs_antennas, 1, 2), ch, t, p);
  EXPECT_EQ(r.total[0], 0.0);
}

TEST(RateOfdm, MatchesDftOracle) {
  std::mt19937_64 rng(9);
  const auto t = locbeam::testing::uniform_topology(9, 3, 2, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {3};
  channel::SelectiveOptions so;
  so.seed = 9;
  const auto ch = channel::selective_channels(t, p, so);
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 2);
  const RateReport r = rate_ofdm(cov, ch, t, p);
  const int per_block = p.subcarriers / p.blocks;
  const double prefactor = p.data_symbols / (3.0 * (p.data_symbols + 1.0));
  EXPECT_NEAR(ofdm_prefactor(p, 3), prefactor, 1e-15);
  for (int i = 0; i < 2; ++i) {
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double z = ch.zeta_at(j, i);
      for (int b = 1; b <= p.blocks; ++b) {
        for (int n = 1; n <= per_block; ++n) {
          const int c = ofdm::subcarrier_index(p.subcarriers, p.blocks, b, n);
          // g^H w = sum_l exp(-i 2 pi c l / N) h_l^H w
          CVector g = CVector::Zero(2);
          for (int l = 0; l < 3; ++l) g += std::polar(1.0, 2.0 * kPi * c * l / p.subcarriers) * ch.at(j, i).col(l);
          double signal = 0.0, interference = p.noise_w;
          for (int k = 0; k < 2; ++k) {
            const double xi = z * z * g.dot(cov.at(j, k, b - 1) * g).real();
            (k == i ? signal : interference) += xi;
          }
          total += std::log2(1.0 + signal / interference);
        }
      }
    }
    EXPECT_NEAR(r.total[i], prefactor * total, 1e-10 * std::max(1.0, prefactor * total));
  }
}

TEST(DcTangent, TightAtExpansionPoint) {
  std::mt19937_64 rng(10);
  const Flat f = flat(10, 3, 3, 2);
  const auto cov = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      double interference = f.p.noise_w;
      for (int k = 0; k < 3; ++k) {
        if (k != i) interference += channel::effective_gain(cov.at(j, k, 0), f.ch.at(j, i), f.ch.zeta_at(j, i));
      }
      EXPECT_NEAR(dc_tangent_flat(cov, cov, f.ch, i, j, f.p.noise_w), std::log2(interference), 1e-12);
    }
  }
}

TEST(DcTangent, ConstantWithoutInterference) {
  std::mt19937_64 rng(11);
  const Flat f = flat(11, 3, 1, 2);
  const auto a = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 1);
  const auto b = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 1);
  EXPECT_NEAR(dc_tangent_flat(a, b, f.ch, 0, 1, f.p.noise_w), std::log2(f.p.noise_w), 1e-12);
}

TEST(DcTangent, FlatMajorizesConcaveTerm) {
  std::mt19937_64 rng(12);
  const Flat f = flat(12, 3, 3, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto old = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 3);
    const auto next = locbeam::testing::random_covariances(rng, f.t.bs_antennas, 3, 1, 1e-2);
    const int i = trial % 3, j = (trial / 3) % 3;
    double interference = f.p.noise_w;
    for (int k = 0; k < 3; ++k) {
      if (k != i) interference += channel::effective_gain(next.at(j, k, 0), f.ch.at(j, i), f.ch.zeta_at(j, i));
    }
    EXPECT_GE(dc_tangent_flat(next, old, f.ch, i, j, f.p.noise_w), std::log2(interference) - 1e-12);
  }
}

TEST(DcTangent, OfdmMajorizesAndTouches) {
  std::mt19937_64 rng(13);
  const auto t = locbeam::testing::uniform_topology(13, 3, 2, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {2};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const GainTable g = ofdm_rate_gains(ch, p);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto old = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 2);
    const auto next = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 2, 1e-2);
    const int i = trial % 2, j = trial % 3, s = trial % g.n_slots;
    const double at_old = dc_tangent_ofdm(old, old, ch, p, i, j, s);
    EXPECT_NEAR(at_old, std::log2(p.noise_w + g.interference(old, j, i, s)), 1e-12);
    EXPECT_GE(dc_tangent_ofdm(next, old, ch, p, i, j, s), std::log2(p.noise_w + g.interference(next, j, i, s)) - 1e-12);
  }
}

TEST(DcTangent, OfdmConstantWithoutInterference) {
  std::mt19937_64 rng(14);
  const auto t = locbeam::testing::uniform_topology(14, 3, 1, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {2};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const auto a = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 2);
  const auto b = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 2);
  EXPECT_NEAR(dc_tangent_ofdm(a, b, ch, p, 0, 2, 3), std::log2(p.noise_w), 1e-12);
}
