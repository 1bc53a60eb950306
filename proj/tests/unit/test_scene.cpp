// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "locbeam/error.hpp"
#include "locbeam/harness.hpp"
#include "locbeam/scene.hpp"
#include "locbeam/units.hpp"

using namespace locbeam;
using namespace locbeam::scene;

TEST(DistanceAndAngle, ThreeFourFive) {
  const Polar p = distance_and_angle({0, 0}, {3, 4});
  EXPECT_DOUBLE_EQ(p.distance, 5.0);
  EXPECT_DOUBLE_EQ(p.angle, std::atan2(4.0, 3.0));
}

TEST(DistanceAndAngle, StraightUp) {
  const Polar p = distance_and_angle({0, 0}, {0, 1});
  EXPECT_DOUBLE_EQ(p.distance, 1.0);
  EXPECT_DOUBLE_EQ(p.angle, kPi / 2);
}

TEST(DistanceAndAngle, CoincidentIsDegenerate) {
  EXPECT_THROW(distance_and_angle({1, 1}, {1, 1}), DegenerateGeometry);
}

TEST(PathLoss, UnitAtZeroDistance) { EXPECT_DOUBLE_EQ(path_loss(0.0, 10.0, 4.0), 1.0); }

TEST(PathLoss, HalfPowerAtReference) { EXPECT_NEAR(path_loss(7.0, 7.0, 3.0), 1.0 / std::sqrt(2.0), 1e-15); }

TEST(PathLoss, DecreasingInDistance) {
  double prev = 1.0;
  for (double d = 1.0; d < 1000.0; d *= 1.7) {
    const double z = path_loss(d, 5.0, 4.0);
    EXPECT_LT(z, prev);
    EXPECT_GT(z, 0.0);
    prev = z;
  }
}

TEST(Calibration, HalfPowerGivesUnitReference) {
  EXPECT_NEAR(calibrate_reference_distance(-3.0103, 1.0, 2.0), 1.0, 1e-4);
}

TEST(Calibration, RoundTripAtHundredMeters) {
  const double ref = calibrate_reference_distance(-110.0, 100.0, 4.0);
  const double z = path_loss(100.0, ref, 4.0);
  EXPECT_NEAR(z * z, 1e-11, 1e-14);
}

TEST(Calibration, PositiveGainRejected) {
  EXPECT_THROW(calibrate_reference_distance(3.0, 100.0, 4.0), InvalidCalibration);
}

TEST(Topology, LineSceneOffset) {
  PlacementOptions po;
  po.kind = Placement::kLineScene;
  po.line_offset = 0.3;
  const Topology t = random_topology(1, 200.0, 4, 2, po);
  EXPECT_DOUBLE_EQ(t.ms[0].x, 100.0);
  EXPECT_DOUBLE_EQ(t.ms[0].y, 100.0);
  EXPECT_DOUBLE_EQ(t.ms[1].x, 160.0);
  EXPECT_DOUBLE_EQ(t.ms[1].y, 100.0);
  ASSERT_EQ(t.n_bs(), 4);
  EXPECT_DOUBLE_EQ(t.bs[0].x, 0.0);
}

TEST(Topology, SeedDeterminism) {
  PlacementOptions po;
  po.kind = Placement::kUniform;
  const Topology a = random_topology(42, 200.0, 5, 3, po);
  const Topology b = random_topology(42, 200.0, 5, 3, po);
  for (int j = 0; j < 5; ++j) {
    EXPECT_EQ(a.bs[j].x, b.bs[j].x);
    EXPECT_EQ(a.bs[j].y, b.bs[j].y);
  }
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.ms[i].x, b.ms[i].x);
    EXPECT_EQ(a.ms[i].y, b.ms[i].y);
  }
}

TEST(Topology, TwoBaseStationsNotLocalizable) {
  PlacementOptions po;
  po.kind = Placement::kUniform;
  EXPECT_THROW(random_topology(1, 200.0, 2, 1, po), LocalizabilityError);
}

TEST(Topology, UniformPointsInsideRegion) {
  PlacementOptions po;
  po.kind = Placement::kUniform;
  const Topology t = random_topology(3, 50.0, 6, 6, po);
  for (const auto& p : t.bs) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LE(p.x, 50.0);
  }
  for (const auto& p : t.ms) {
    EXPECT_GE(p.y, 0.0);
    EXPECT_LE(p.y, 50.0);
  }
}

TEST(Params, DefaultsMatchFlatSetup) {
  const SystemParams p = default_params();
  EXPECT_NEAR(watts_to_dbm(p.noise_w), -121.0, 1e-12);
  const double z = path_loss(100.0, p.reference_distance, p.pathloss_exponent);
  EXPECT_NEAR(ratio_to_db(z * z), -110.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.pilot_symbols, 10.0);
  EXPECT_DOUBLE_EQ(p.bandwidth_hz, 200e3);
}

TEST(Requirements, RejectsNonPositiveAccuracy) {
  Requirements r = Requirements::broadcast(2, 1.0, 0.0);
  EXPECT_THROW(r.validate(2), InvalidArgument);
  r = Requirements::broadcast(2, -1.0, 10.0);
  EXPECT_THROW(r.validate(2), InvalidArgument);
  r = Requirements::broadcast(2, 1.0, kInf);
  EXPECT_NO_THROW(r.validate(2));
  EXPECT_FALSE(r.has_accuracy(0));
}

TEST(Uncertainty, PathLossBoundsBracketNominal) {
  PlacementOptions po;
  po.kind = Placement::kUniform;
  const Topology t = random_topology(5, 200.0, 4, 2, po);
  const SystemParams p = default_params();
  const UncertaintyModel u = make_uncertainty(t, p, 2.0, 0.05);
  for (const auto& l : u.links) {
    const double z = path_loss(l.nominal_distance, p.reference_distance, p.pathloss_exponent);
    EXPECT_LE(l.zeta_lower, z);
    EXPECT_GE(l.zeta_upper, z);
  }
}

TEST(Dbm, OneMilliwattIsZeroDbm) {
  EXPECT_NEAR(harness::dbm_conversion(1e-3, harness::DbmDirection::kWattsToDbm), 0.0, 1e-15);
}

TEST(Dbm, NoiseFloor) {
  const double w = harness::dbm_conversion(-121.0, harness::DbmDirection::kDbmToWatts);
  EXPECT_NEAR(w / 1e-3, std::pow(10.0, -12.1), 1e-12 * std::pow(10.0, -12.1));
}

TEST(Dbm, RoundTrip) {
  for (double x : {1e-15, 3.7e-9, 0.25, 1.0, 42.0}) {
    const double dbm = harness::dbm_conversion(x, harness::DbmDirection::kWattsToDbm);
    const double back = harness::dbm_conversion(dbm, harness::DbmDirection::kDbmToWatts);
    EXPECT_NEAR(back, x, 1e-12 * x);
  }
}
