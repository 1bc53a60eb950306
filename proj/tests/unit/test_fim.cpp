// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "locbeam/channel.hpp"
#include "locbeam/error.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/fim_oracle.hpp"
#include "locbeam/ofdm.hpp"
#include "test_support.hpp"

using namespace locbeam;
using namespace locbeam::fim;
using locbeam::testing::relative;

namespace {

double min_eig(const Mat2& m) {
  return Eigen::SelfAdjointEigenSolver<Mat2>((m + m.transpose()) / 2.0, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

// BSs at distance `radius` from an MS at (100, 100), seen from the BS at the given angles.
scene::Topology star(const std::vector<double>& angles, double radius, int antennas) {
  std::vector<scene::Position> bs;
  for (double a : angles) bs.push_back({100.0 - radius * std::cos(a), 100.0 - radius * std::sin(a)});
  return locbeam::testing::explicit_topology(bs, {{100.0, 100.0}}, antennas);
}

CovarianceSet unit_power(const scene::Topology& t, int n_blocks = 1) {
  return CovarianceSet::isotropic(t.bs_antennas, t.n_ms(), n_blocks, 1.0);
}

}  // namespace

TEST(DirectionMatrix, AxisAligned) {
  EXPECT_LT((j_phi(0.0) - Mat2{{1, 0}, {0, 0}}).norm(), 1e-15);
  EXPECT_LT((j_phi(kPi / 2) - Mat2{{0, 0}, {0, 1}}).norm(), 1e-15);
}

TEST(DirectionMatrix, QuarterTurnsSumToIdentity) {
  for (double phi = -3.0; phi < 3.2; phi += 0.37) {
    EXPECT_LT((j_phi(phi) + j_phi(phi + kPi / 2) - Mat2::Identity()).norm(), 1e-14);
  }
}

TEST(PairMatrix, Examples) {
  EXPECT_LT(j_phi_pair(0.4, 0.4).norm(), 1e-15);
  EXPECT_LT((j_phi_pair(0.0, kPi) - Mat2{{4, 0}, {0, 0}}).norm(), 1e-14);
  EXPECT_LT((j_phi_pair(0.0, kPi / 2) - Mat2{{1, -1}, {-1, 1}}).norm(), 1e-14);
}

TEST(Crb, Examples) {
  EXPECT_NEAR(crb(Mat2(Mat2::Identity())).value, 2.0, 1e-15);
  const CrbResult singular = crb(Mat2{{2, 0}, {0, 0}});
  EXPECT_TRUE(singular.singular);
  EXPECT_TRUE(std::isinf(singular.value));
  EXPECT_NEAR(crb(Mat2{{4, 0}, {0, 0.5}}).value, 0.25 + 2.0, 1e-14);
}

TEST(ToaCombination, OrthogonalPairGivesIdentity) {
  const Mat2 j = toa_combination({1.0, 1.0}, {j_phi(0.0), j_phi(kPi / 2)});
  EXPECT_LT((j - Mat2::Identity()).norm(), 1e-15);
  EXPECT_NEAR(crb(j).value, 2.0, 1e-15);
}

TEST(EfimToa, SingleDirectionIsSingular) {
  const Mat2 j = toa_combination({3.0}, {j_phi(0.8)});
  EXPECT_TRUE(crb(j).singular);
}

TEST(EfimToa, ThreeEquispacedBaseStations) {
  const auto t = star({0.0, 2 * kPi / 3, 4 * kPi / 3}, 50.0, 1);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const Efim e = efim_toa_flat(unit_power(t), ch, t, p, 0);
  const double z = ch.zeta_at(0, 0);
  const double s = z * z / p.noise_w;
  Mat2 direct = Mat2::Zero();
  for (double a : {0.0, 2 * kPi / 3, 4 * kPi / 3}) {
    const Vec2 u(std::cos(a), std::sin(a));
    direct += s * u * u.transpose();
  }
  EXPECT_LT((e.normalized - direct).norm(), 1e-12 * direct.norm());
  EXPECT_LT((e.normalized - 1.5 * s * Mat2::Identity()).norm(), 1e-9 * s);
  EXPECT_NEAR(crb(e.normalized).value, 4.0 / (3.0 * s), 1e-9 * 4.0 / (3.0 * s));
  EXPECT_NEAR(e.scale, p.flat_scale(), 0.0);
}

TEST(EfimToa, MatchesFullFimOracle) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 10; ++k) {
    const auto t = locbeam::testing::uniform_topology(100 + k, 3 + k % 2, 1 + k % 2, 2);
    const auto p = scene::default_params();
    const auto ch = channel::flat_channels(t, p);
    const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, t.n_ms(), 1, 1e-3);
    for (int i = 0; i < t.n_ms(); ++i) {
      const Efim e = efim_toa_flat(cov, ch, t, p, i);
      const FullFim o = oracle_full_fim_flat(cov, ch, t, p, i, FlatMode::kToa);
      EXPECT_LT((e.matrix() - o.efim.matrix()).norm(), 1e-9 * e.matrix().norm());
      EXPECT_EQ(o.b.cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(EfimTdoa, LargeClockPriorApproachesToa) {
  std::mt19937_64 rng(3);
  const auto t = locbeam::testing::uniform_topology(9, 4, 2, 3);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 1, 1e-3);
  const Efim toa = efim_toa_flat(cov, ch, t, p, 1);
  const auto snr = link_snr(cov, flat_gains(ch), p.noise_w, 1);
  double total = 0.0;
  for (double s : snr) total += s;
  const Efim tdoa = efim_tdoa_flat(cov, ch, t, p, 1, 1e9 * total);
  EXPECT_LT((tdoa.normalized - toa.normalized).norm(), 1e-6 * toa.normalized.norm());
}

TEST(EfimTdoa, TwoBaseStationsWithoutPriorAreRankOne) {
  const std::vector<double> snr{2.0, 5.0};
  const std::vector<Mat2> dir{j_phi(0.3), j_phi(1.9)};
  const Mat2 p = j_phi_pair(0.3, 1.9);
  const Mat2 j = tdoa_combination(snr, dir, [&](int, int) { return p; }, 0.0);
  EXPECT_LT((j - 10.0 / 7.0 * p).norm(), 1e-14);
  EXPECT_TRUE(crb(j).singular);
}

TEST(EfimTdoa, ToaDominatesTdoa) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const auto t = locbeam::testing::uniform_topology(200 + k, 3 + k % 3, 2, 2);
    const auto p = scene::default_params();
    const auto ch = channel::flat_channels(t, p);
    const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 1, 1e-3);
    for (double kb : {0.0, 1.0, 1e3}) {
      const Efim toa = efim_toa_flat(cov, ch, t, p, 0);
      const Efim tdoa = efim_tdoa_flat(cov, ch, t, p, 0, kb);
      EXPECT_GE(min_eig(toa.normalized - tdoa.normalized), -1e-9 * toa.normalized.norm());
    }
  }
}

TEST(EfimTdoa, PairAndDifferenceFormsAgree) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto t = locbeam::testing::uniform_topology(300 + k, 4, 2, 3);
    const auto p = scene::default_params();
    const auto ch = channel::flat_channels(t, p);
    const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 1, 1e-3);
    const Efim a = efim_tdoa_flat(cov, ch, t, p, 1, 5.0);
    const Efim b = efim_tdoa_flat_difference(cov, ch, t, p, 1, 5.0);
    EXPECT_LT((a.normalized - b.normalized).norm(), 1e-9 * a.normalized.norm());
  }
}

TEST(EfimTdoa, MatchesFullFimOracle) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const auto t = locbeam::testing::uniform_topology(400 + k, 3 + k % 2, 1 + k % 2, 2);
    const auto p = scene::default_params();
    const auto ch = channel::flat_channels(t, p);
    const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, t.n_ms(), 1, 1e-3);
    for (double kb : {0.0, 1.0, 1e3}) {
      const Efim e = efim_tdoa_flat(cov, ch, t, p, 0, kb);
      const FullFim o = oracle_full_fim_flat(cov, ch, t, p, 0, FlatMode::kTdoa, kb);
      EXPECT_LT((e.matrix() - o.efim.matrix()).norm(), 1e-8 * e.matrix().norm());
    }
  }
}

TEST(LowerBound, VanishingCorrectionForHugePrior) {
  const auto t = locbeam::testing::uniform_topology(12, 4, 1, 2);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto cov = unit_power(t);
  const Efim toa = efim_toa_flat(cov, ch, t, p, 0);
  const Efim lb = efim_tdoa_lower_bound(cov, ch, t, p, 0, 1e40);
  EXPECT_LT((lb.normalized - toa.normalized).norm(), 1e-9 * toa.normalized.norm());
}

TEST(LowerBound, CorrectionUsesMaximumSnr) {
  const auto t = locbeam::testing::uniform_topology(13, 4, 1, 1);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto cov = unit_power(t);
  const double kb = 1e6;
  Vec2 v = Vec2::Zero();
  for (int j = 0; j < 4; ++j) {
    const double z = ch.zeta_at(j, 0);
    const double a = t.link(j, 0).angle;
    v += z * z / p.noise_w * Vec2(std::cos(a), std::sin(a));
  }
  const Efim toa = efim_toa_flat(cov, ch, t, p, 0);
  const Efim lb = efim_tdoa_lower_bound(cov, ch, t, p, 0, kb);
  const Mat2 expected = toa.normalized - v * v.transpose() / kb;
  EXPECT_LT((lb.normalized - expected).norm(), 1e-12 * expected.norm());
}

// The bound subtracts a v v^T / K_b with v built from maximum SNRs, while the exact EFIM subtracts
// w w^T / (sum SNR + K_b) with w built from the actual SNRs. When v and w are not parallel the
// difference a v v^T - b w w^T has a negative eigenvalue, so the ordering fails.
TEST(LowerBound, OrderingFailsForNonProportionalAllocation) {
  const auto t = star({0.0, 2.0, 4.0}, 50.0, 1);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  CovarianceSet cov(t.bs_antennas, 1);
  cov.at(0, 0, 0) = CMatrix::Identity(1, 1);
  cov.at(1, 0, 0) = 1e-3 * CMatrix::Identity(1, 1);
  cov.at(2, 0, 0) = 1e-3 * CMatrix::Identity(1, 1);
  const double z = ch.zeta_at(0, 0);
  const double kb = z * z / p.noise_w;
  const Efim exact = efim_tdoa_flat(cov, ch, t, p, 0, kb);
  const Efim lb = efim_tdoa_lower_bound(cov, ch, t, p, 0, kb);
  EXPECT_LT(min_eig(exact.normalized - lb.normalized), -1e-3 * exact.normalized.norm());
}

TEST(RobustDirection, ZeroWidthIsNominal) {
  EXPECT_LT((q_phi_toa(0.7, 0.0) - j_phi(0.7)).norm(), 1e-15);
  EXPECT_LT((q_phi_tdoa(0.7, 2.0, 0.0, 0.0) - j_phi_pair(0.7, 2.0)).norm(), 1e-14);
  EXPECT_LT((q_phi_tdoa(0.0, kPi, 0.0, 0.0) - Mat2{{4, 0}, {0, 0}}).norm(), 1e-14);
}

TEST(RobustDirection, ThirtyDegreeExample) {
  EXPECT_LT((q_phi_toa(0.0, kPi / 6) - Mat2{{0.5, 0}, {0, -0.5}}).norm(), 1e-14);
}

TEST(RobustDirection, SampledDominance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = 3.0 * unit(rng), b = 3.0 * unit(rng);
    const double ea = 0.4 * std::abs(unit(rng)), eb = 0.4 * std::abs(unit(rng));
    const double pa = a + ea * unit(rng), pb = b + eb * unit(rng);
    EXPECT_GE(min_eig(j_phi(pa) - q_phi_toa(a, ea)), -1e-9);
    EXPECT_GE(min_eig(j_phi_pair(pa, pb) - q_phi_tdoa(a, b, ea, eb)), -1e-9);
  }
}

TEST(RobustDirection, HalfWidthOutOfRange) { EXPECT_THROW(q_phi_toa(0.0, kPi / 2), InvalidArgument); }

TEST(EfimRobust, DegenerateSetMatchesNominal) {
  std::mt19937_64 rng(9);
  const auto t = locbeam::testing::uniform_topology(14, 4, 2, 3);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto u = scene::make_uncertainty(t, p, 0.0, 0.0);
  const auto stats = channel::robust_stats(t, u, 1);
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 2, 1, 1e-3);
  const Efim nominal = efim_toa_flat(cov, ch, t, p, 1);
  const Efim robust = efim_robust(cov, stats, u, p, 1, RobustMode::kToa);
  EXPECT_LT((robust.normalized - nominal.normalized).norm(), 1e-9 * nominal.normalized.norm());
  const Efim nominal_tdoa = efim_tdoa_flat(cov, ch, t, p, 1, 3.0);
  const Efim robust_tdoa = efim_robust(cov, stats, u, p, 1, RobustMode::kTdoa, 3.0);
  EXPECT_LT((robust_tdoa.normalized - nominal_tdoa.normalized).norm(), 1e-9 * nominal_tdoa.normalized.norm());
}

TEST(EfimRobust, DistanceUncertaintyRaisesCrb) {
  std::mt19937_64 rng(10);
  const auto t = locbeam::testing::uniform_topology(15, 4, 1, 2);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto u = scene::make_uncertainty(t, p, 5.0, 0.0);
  const auto stats = channel::robust_stats(t, u, 1);
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 1, 1e-3);
  const double nominal = crb(efim_toa_flat(cov, ch, t, p, 0)).value;
  const double robust = crb(efim_robust(cov, stats, u, p, 0, RobustMode::kToa)).value;
  EXPECT_GE(robust, nominal);
}

TEST(OfdmKernel, SinglePathClosedForm) {
  const int n = 16, blocks = 2;
  for (int b = 1; b <= blocks; ++b) {
    double sum = 0.0, sum2 = 0.0;
    for (int k = 1; k <= n / blocks; ++k) {
      const double c = ofdm::subcarrier_index(n, blocks, b, k);
      sum += c;
      sum2 += c * c;
    }
    const CMatrix kern = ofdm::delay_kernel(n, blocks, b, 1);
    EXPECT_NEAR(kern(0, 0).real(), sum2 - sum * sum / (n / blocks), 1e-9);
  }
}

TEST(OfdmKernel, VanishesWhenBlockEqualsPathCount) {
  EXPECT_LT(ofdm::delay_kernel(8, 2, 1, 4).norm(), 1e-9);
  EXPECT_LT(ofdm::delay_kernel(16, 4, 3, 4).norm(), 1e-9);
}

TEST(EfimOfdm, MatchesFullFimOracle) {
  std::mt19937_64 rng(12);
  const auto t = locbeam::testing::uniform_topology(16, 3, 1, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {2};
  channel::SelectiveOptions so;
  so.seed = 4;
  const auto ch = channel::selective_channels(t, p, so);
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 2, 1e-3);
  const Efim e = efim_toa_ofdm(cov, ch, t, p, 0);
  const FullFim o = oracle_full_fim_ofdm(cov, ch, t, p, 0);
  EXPECT_LT((e.matrix() - o.efim.matrix()).norm(), 1e-8 * e.matrix().norm());
}

TEST(EfimOfdm, SingularWhenBlockEqualsPathCount) {
  std::mt19937_64 rng(13);
  const auto t = locbeam::testing::uniform_topology(17, 3, 1, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 2;
  p.paths = {4};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 2, 1e-3);
  const Efim e = efim_toa_ofdm(cov, ch, t, p, 0);
  EXPECT_LT(e.normalized.norm(), 1e-9);
  const FullFim o = oracle_full_fim_ofdm(cov, ch, t, p, 0);
  EXPECT_LT(o.efim.normalized.norm(), 1e-6 * std::max(1.0, o.a.norm() / e.scale));
}

TEST(EfimOfdm, SingleBlockCouplesChannelParameters) {
  std::mt19937_64 rng(14);
  const auto t = locbeam::testing::uniform_topology(18, 3, 1, 2);
  auto p = scene::default_params();
  p.subcarriers = 8;
  p.blocks = 1;
  p.paths = {2};
  const auto ch = channel::selective_channels(t, p, channel::SelectiveOptions{});
  const auto cov = locbeam::testing::random_covariances(rng, t.bs_antennas, 1, 1, 1e-3);
  const FullFim o = oracle_full_fim_ofdm(cov, ch, t, p, 0);
  EXPECT_GT(o.b.cwiseAbs().maxCoeff(), 0.0);
}
