// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "locbeam/harness.hpp"

using namespace locbeam;
using namespace locbeam::harness;

namespace {

std::string fixture(const std::string& name) { return std::string(LOCBEAM_FIXTURES) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Config, MinimalToa) {
  const ScenarioConfig c = load_config(fixture("minimal_toa.json"));
  EXPECT_EQ(c.n_bs, 3);
  EXPECT_EQ(c.n_ms, 1);
  EXPECT_EQ(c.mode, optimizer::Mode::kToaFlat);
  ASSERT_EQ(c.rate.size(), 1u);
  EXPECT_EQ(c.rate[0], 1.0);
  EXPECT_EQ(c.accuracy[0], 400.0);
  EXPECT_TRUE(c.sweep_param.empty());
  const optimizer::Scenario s = build_scenario(c, 0.0, ConstraintMode::kBoth, 0);
  EXPECT_EQ(s.n_bs(), 3);
  EXPECT_EQ(s.topology.bs_antennas[0], 2);
}

TEST(Config, ConstraintModesDropRequirements) {
  const ScenarioConfig c = load_config(fixture("sweep_line.json"));
  const auto rate = build_scenario(c, 0.1, ConstraintMode::kRateOnly, 0);
  const auto loc = build_scenario(c, 0.1, ConstraintMode::kLocOnly, 0);
  EXPECT_TRUE(std::isinf(rate.requirements.accuracy[0]));
  EXPECT_EQ(rate.requirements.rate[0], 1.2);
  EXPECT_EQ(loc.requirements.rate[0], 0.0);
  EXPECT_EQ(loc.requirements.accuracy[0], 400.0);
}

TEST(Config, MalformedJson) { EXPECT_THROW(load_config(fixture("malformed.json")), InvalidArgument); }

TEST(Config, UnknownMode) { EXPECT_THROW(load_config(fixture("unknown_mode.json")), InvalidArgument); }

TEST(Config, UnknownSweepParameter) {
  const std::string text =
      R"({"bs": "corners", "ms": [{"x": 10, "y": 10}], "mode": "toa_flat", "sweep": {"param": "gamma", "grid": [1]}})";
  EXPECT_THROW(parse_config_text(text), InvalidArgument);
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config(fixture("does_not_exist.json")), InvalidArgument); }

TEST(Config, NegativeRateRejected) {
  const std::string text =
      R"({"bs": "corners", "ms": [{"x": 10, "y": 10}], "mode": "toa_flat", "requirements": {"rate_bps_hz": -1}})";
  EXPECT_THROW(parse_config_text(text), InvalidArgument);
}

TEST(Csv, HeaderAndRowPerMs) {
  const ScenarioConfig c = load_config(fixture("sweep_line.json"));
  RunOptions run;
  run.record_timing = false;
  const RunResult r = run_scenario(c, run);
  ASSERT_EQ(r.rows.size(), 6u);
  std::ostringstream out;
  write_csv(out, r.rows);
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 1u + 6u * 2u);
  EXPECT_EQ(ls[0], kCsvHeader);
  for (std::size_t k = 1; k < ls.size(); ++k) {
    EXPECT_EQ(std::count(ls[k].begin(), ls[k].end(), ','), 11) << ls[k];
    EXPECT_EQ(ls[k].substr(ls[k].rfind(',') + 1), "0");
  }
  EXPECT_EQ(r.rows[0].mode, ConstraintMode::kRateOnly);
  EXPECT_EQ(r.rows[2].mode, ConstraintMode::kBoth);
  EXPECT_EQ(r.rows[3].sweep, 0.3);
}

TEST(Csv, RepeatedRunsAreByteIdentical) {
  const ScenarioConfig c = load_config(fixture("minimal_toa.json"));
  RunOptions run;
  run.record_timing = false;
  std::ostringstream a, b;
  write_csv(a, run_scenario(c, run).rows);
  write_csv(b, run_scenario(c, run).rows);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(std::stod(format_number(0.1)), 0.1);
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Solutions, RoundTripReproducesConstraints) {
  const ScenarioConfig c = load_config(fixture("minimal_toa.json"));
  RunOptions run;
  run.keep_reports = true;
  const RunResult r = run_scenario(c, run);
  ASSERT_EQ(r.rows.size(), 1u);
  ASSERT_EQ(r.rows[0].status, optimizer::Status::kFeasible) << r.rows[0].message;
  const nlohmann::json doc = nlohmann::json::parse(solutions_to_json(r).dump());
  const auto entries = evaluate_solutions(c, doc);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_TRUE(entries[0].report.feasible);
  EXPECT_NEAR(entries[0].report.rate[0], r.rows[0].rate[0], 1e-9);
  EXPECT_NEAR(entries[0].report.crb[0], r.rows[0].crb[0], 1e-9 * r.rows[0].crb[0]);
}

TEST(Solutions, BeamformerJsonRoundTrip) {
  BeamformerSet w({2, 3}, 2);
  w.at(0, 1) << Complex(1.0, -2.0), Complex(0.5, 0.25);
  w.at(1, 0) << Complex(0.0, 1.0), Complex(3.0, 0.0), Complex(-1.0, -1.0);
  const BeamformerSet back = beamformers_from_json(beamformers_to_json(w), {2, 3}, 2, 1);
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) EXPECT_EQ((back.at(j, i) - w.at(j, i)).norm(), 0.0);
  }
}

TEST(Solutions, ShapeMismatchRejected) {
  BeamformerSet w({2, 2}, 1);
  w.at(1, 0) << Complex(1.0, 0.0), Complex(0.0, 1.0);
  const nlohmann::json j = beamformers_to_json(w);
  EXPECT_THROW(beamformers_from_json(j, {2}, 1, 1), InvalidArgument);
  EXPECT_THROW(beamformers_from_json(j, {2, 3}, 1, 1), InvalidArgument);
}

TEST(Dbm, Conversions) {
  EXPECT_NEAR(dbm_conversion(1.0, DbmDirection::kWattsToDbm), 30.0, 1e-12);
  EXPECT_NEAR(dbm_conversion(0.0, DbmDirection::kDbmToWatts), 1e-3, 1e-18);
  EXPECT_TRUE(std::isinf(dbm_conversion(0.0, DbmDirection::kWattsToDbm)));
}
