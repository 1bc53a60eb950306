// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "locbeam/channel.hpp"
#include "locbeam/error.hpp"
#include "test_support.hpp"

using namespace locbeam;
using namespace locbeam::channel;

TEST(SteeringVector, BroadsideIsAllOnes) {
  const CVector s = steering_vector(kPi / 2, 4);
  for (int m = 0; m < 4; ++m) {
    EXPECT_NEAR(s(m).real(), 1.0, 1e-15);
    EXPECT_NEAR(s(m).imag(), 0.0, 1e-15);
  }
}

TEST(SteeringVector, EndfireTwoElements) {
  const CVector s = steering_vector(0.0, 2);
  EXPECT_NEAR(s(0).real(), 1.0, 1e-15);
  EXPECT_NEAR(s(1).real(), -1.0, 1e-15);
  EXPECT_NEAR(s(1).imag(), 0.0, 1e-15);
}

TEST(SteeringVector, UnitModulusEntries) {
  for (double phi : {-2.9, -0.4, 0.0, 0.7, 1.9, 3.1}) {
    EXPECT_NEAR(steering_vector(phi, 8).squaredNorm(), 8.0, 1e-12);
  }
}

TEST(SteeringVector, RejectsZeroAntennas) { EXPECT_THROW(steering_vector(0.3, 0), InvalidArgument); }

TEST(FlatChannels, SingleAntennaIsOne) {
  const auto t = locbeam::testing::uniform_topology(3, 4, 2, 1);
  const auto c = flat_channels(t, scene::default_params());
  for (const CVector& h : c.h) {
    ASSERT_EQ(h.size(), 1);
    EXPECT_NEAR(std::abs(h(0) - Complex(1.0, 0.0)), 0.0, 1e-15);
  }
}

TEST(FlatChannels, CenterOfCornersIsSymmetric) {
  const auto t = locbeam::testing::corners_line(0.3, 4, 1);
  const auto c = flat_channels(t, scene::default_params());
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(c.zeta_at(j, 0), c.zeta_at(0, 0), 1e-15);
}

TEST(FlatChannels, MatchesSteeringVector) {
  const auto t = locbeam::testing::uniform_topology(8, 3, 2, 4);
  const auto c = flat_channels(t, scene::default_params());
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 2; ++i) {
      const CVector s = steering_vector(t.link(j, i).angle, 4);
      EXPECT_LT((c.at(j, i) - s).norm(), 1e-15);
    }
  }
}

TEST(SelectiveChannels, SinglePathNoSpreadFollowsSteering) {
  const auto t = locbeam::testing::uniform_topology(2, 3, 1, 4);
  auto p = scene::default_params();
  p.paths = {1};
  SelectiveOptions o;
  o.angle_spread_deg = 0.0;
  const auto c = selective_channels(t, p, o);
  for (int j = 0; j < 3; ++j) {
    const CVector s = steering_vector(t.link(j, 0).angle, 4);
    const CVector col = c.at(j, 0).col(0);
    const Complex ratio = col(0) / s(0);
    EXPECT_LT((col - ratio * s).norm(), 1e-12 * col.norm());
  }
}

TEST(SelectiveChannels, FlatProfileHasEqualPathPowers) {
  const auto t = locbeam::testing::uniform_topology(2, 3, 1, 4);
  auto p = scene::default_params();
  p.paths = {3};
  SelectiveOptions o;
  o.decay_rate = 0.0;
  const int draws = 10000;
  std::vector<double> power(3, 0.0);
  for (int k = 0; k < draws; ++k) {
    o.seed = 1000 + k;
    const auto c = selective_channels(t, p, o);
    for (int l = 0; l < 3; ++l) power[l] += c.at(0, 0).col(l).squaredNorm() / 4.0;
  }
  double total = 0.0;
  for (double& x : power) {
    x /= draws;
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 0.05);
  for (double x : power) EXPECT_NEAR(x, 1.0 / 3.0, 0.05 / 3.0);
}

TEST(SelectiveChannels, SeedDeterminism) {
  const auto t = locbeam::testing::uniform_topology(2, 3, 2, 4);
  auto p = scene::default_params();
  p.paths = {3};
  SelectiveOptions o;
  o.seed = 77;
  const auto a = selective_channels(t, p, o);
  const auto b = selective_channels(t, p, o);
  for (std::size_t k = 0; k < a.h.size(); ++k) EXPECT_EQ((a.h[k] - b.h[k]).norm(), 0.0);
}

TEST(AngularCovariance, ZeroWidthIsRankOne) {
  const CMatrix r = angular_covariance(0.8, 0.0, 4, 11);
  const CVector s = steering_vector(0.8, 4);
  EXPECT_LT((r - s * s.adjoint()).norm(), 1e-13);
}

TEST(AngularCovariance, TraceEqualsAntennaCount) {
  for (int m : {1, 3, 6}) {
    EXPECT_NEAR(angular_covariance(1.1, 0.3, m, 501).trace().real(), m, 1e-12);
  }
}

TEST(AngularCovariance, QuadratureRefinement) {
  const CMatrix coarse = angular_covariance(kPi / 4, 0.1, 4, 1001);
  const CMatrix fine = angular_covariance(kPi / 4, 0.1, 4, 2001);
  EXPECT_LT((coarse - fine).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(EffectiveGain, RankOneIdentity) {
  std::mt19937_64 rng(5);
  const CVector w = locbeam::testing::random_cvector(rng, 4);
  const CVector h = locbeam::testing::random_cvector(rng, 4);
  const double zeta = 0.37;
  const double expected = zeta * zeta * std::norm(h.dot(w));
  EXPECT_NEAR(effective_gain(w * w.adjoint(), h, zeta), expected, 1e-12 * expected);
}

TEST(EffectiveGain, IdentityCovariance) {
  const CVector h = steering_vector(0.4, 5);
  EXPECT_NEAR(effective_gain(CMatrix::Identity(5, 5), h, 0.5), 0.25 * 5, 1e-14);
}

TEST(EffectiveGain, TraceIdentityOracle) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const CMatrix sigma = locbeam::testing::random_psd(rng, 4, 1.0);
    const CVector h = locbeam::testing::random_cvector(rng, 4);
    const double zeta = 0.1 + 0.01 * k;
    const double direct = (zeta * zeta * h * h.adjoint() * sigma).trace().real();
    EXPECT_NEAR(effective_gain(sigma, h, zeta), direct, 1e-12 * std::abs(direct));
    EXPECT_NEAR(effective_gain(sigma, CMatrix(zeta * zeta * h * h.adjoint())), direct, 1e-12 * std::abs(direct));
  }
}

TEST(EffectiveGain, IndefiniteCovarianceRejected) {
  CMatrix sigma = CMatrix::Identity(2, 2);
  sigma(1, 1) = -3.0;
  const CVector h = CVector::Unit(2, 1);
  EXPECT_THROW(effective_gain(sigma, h, 1.0), InvalidArgument);
}

TEST(EffectiveGain, SizeMismatch) {
  EXPECT_THROW(effective_gain(CMatrix::Identity(3, 3), steering_vector(0.1, 4), 1.0), DimensionMismatch);
}

TEST(ChannelJson, FlatRoundTrip) {
  const auto t = locbeam::testing::uniform_topology(4, 3, 2, 3);
  const auto c = flat_channels(t, scene::default_params());
  const nlohmann::json j = c;
  const FlatChannelSet back = j.get<FlatChannelSet>();
  ASSERT_EQ(back.h.size(), c.h.size());
  for (std::size_t k = 0; k < c.h.size(); ++k) {
    EXPECT_EQ((back.h[k] - c.h[k]).norm(), 0.0);
    EXPECT_EQ(back.zeta[k], c.zeta[k]);
  }
}
