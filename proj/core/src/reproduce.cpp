// SPDX-License-Identifier: Apache-2.0
#include "locbeam/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "locbeam/channel.hpp"

namespace locbeam::reproduce {

using harness::ConstraintMode;
using harness::ResultRow;
using nlohmann::json;

namespace {

const json kAllModes = {"rate_only", "loc_only", "both"};

json corners_line(double offset) {
  return {{"region_side_m", 200.0},
          {"bs", "corners"},
          {"antennas", 4},
          {"ms", {{"placement", "line"}, {"count", 2}, {"offset", offset}}},
          {"params", {{"n_p", 10}, {"beta_hz", 200e3}, {"n0_dbm_per_hz", -121.0}, {"eta", 4.0},
                      {"pathloss_ref", {{"db", -110.0}, {"at_m", 100.0}}}, {"duty", 2.0 / 3.0}}}};
}

// N_B N_M max zeta^2 ||h||^2 / N0 for the fig6 geometry; anchors the clock-prior grid.
double clock_prior_reference(const json& base) {
  const auto config = harness::parse_config(base);
  const auto sc = harness::build_scenario(config, 0.0, ConstraintMode::kBoth, 0);
  double best = 0.0;
  for (int j = 0; j < sc.n_bs(); ++j) {
    for (int i = 0; i < sc.n_ms(); ++i) {
      const double z = sc.flat.zeta_at(j, i);
      best = std::max(best, z * z * sc.flat.at(j, i).squaredNorm() / sc.params.noise_w);
    }
  }
  return sc.n_bs() * sc.n_ms() * best;
}

std::string describe(const std::vector<double>& v) {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : "") << harness::format_number(v[k]);
  os << "]";
  return os.str();
}

Verdict all_feasible(const std::vector<ResultRow>& rows) {
  int bad = 0;
  for (const auto& r : rows) bad += r.status != optimizer::Status::kFeasible;
  return {"all runs feasible", bad == 0, std::to_string(bad) + " of " + std::to_string(rows.size()) + " not feasible"};
}

Verdict monotone(const std::string& name, const std::vector<double>& v, bool ok) {
  return {name, ok, describe(v)};
}

Verdict joint_dominates(const std::vector<ResultRow>& rows, const std::vector<double>& grid) {
  const auto rate = mean_power(rows, ConstraintMode::kRateOnly, grid);
  const auto loc = mean_power(rows, ConstraintMode::kLocOnly, grid);
  const auto both = mean_power(rows, ConstraintMode::kBoth, grid);
  bool ok = true;
  std::ostringstream os;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double floor = std::max(rate[k], loc[k]);
    ok = ok && both[k] >= floor * (1.0 - 1e-6);
    os << (k ? "; " : "") << harness::format_number(both[k]) << " vs " << harness::format_number(floor);
  }
  return {"joint power >= max(rate-only, loc-only)", ok, os.str()};
}

bool localizability_rejected(int subcarriers, int blocks, int paths) {
  json c = figure_config("fig7");
  c["ofdm"]["blocks"] = blocks;
  c["ofdm"]["subcarriers"] = subcarriers;
  c["ofdm"]["paths"] = paths;
  c.erase("sweep");
  const auto config = harness::parse_config(c);
  try {
    const auto sc = harness::build_scenario(config, 0.0, ConstraintMode::kLocOnly, 0);
    optimizer::solve(sc, config.options);
  } catch (const LocalizabilityError&) {
    return true;
  }
  return false;
}

}  // namespace

bool FigureResult::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "table1"};
  return ids;
}

json figure_config(const std::string& id) {
  if (id == "fig2") {
    json c = corners_line(0.05);
    c["mode"] = "toa_flat";
    c["requirements"] = {{"rate_bps_hz", 1.2}, {"q_m2", 400.0}};
    c["sweep"] = {{"param", "ms_offset"}, {"grid", {0.05, 0.2, 0.4}}};
    c["modes"] = kAllModes;
    return c;
  }
  if (id == "fig6") {
    json c = corners_line(0.3);
    c["mode"] = "tdoa_flat";
    c["requirements"] = {{"rate_bps_hz", 1.2}, {"q_m2", 400.0}};
    const double ref = clock_prior_reference(c);
    json grid = json::array();
    for (double f : {1e-4, 1e-2, 1.0, 1e2, 1e4}) grid.push_back(f * ref);
    c["sweep"] = {{"param", "clock_prior"}, {"grid", grid}};
    c["modes"] = {"both"};
    return c;
  }
  if (id == "fig3" || id == "fig4") {
    json c = corners_line(0.0);
    const bool f3 = id == "fig3";
    c["bs"] = {{"placement", "uniform"}, {"count", 4}, {"antennas", f3 ? 4 : 5}};
    c["ms"] = {{"placement", "uniform"}, {"count", 2}};
    c["mode"] = "toa_flat";
    c["requirements"] = {{"rate_bps_hz", f3 ? 1.2 : 2.0}, {"q_m2", 400.0}};
    c["sweep"] = f3 ? json{{"param", "n_bs"}, {"grid", {3, 4, 5, 6}}} : json{{"param", "n_ms"}, {"grid", {1, 2, 3}}};
    c["modes"] = kAllModes;
    c["trials"] = 5;
    c["seed"] = f3 ? 300 : 400;
    return c;
  }
  if (id == "fig5") {
    json c = corners_line(0.0);
    c["ms"] = {{"placement", "uniform"}, {"count", 2}};
    c["mode"] = "robust_toa";
    c["requirements"] = {{"rate_bps_hz", 2.0}, {"q_m2", 400.0}};
    c["uncertainty"] = {{"epsilon", 0.0}};
    c["sweep"] = {{"param", "epsilon"}, {"grid", {0.0, 0.05, 0.1}}};
    c["modes"] = {"both"};
    c["trials"] = 5;
    c["seed"] = 500;
    return c;
  }
  if (id == "fig7") {
    json c = corners_line(0.25);
    c["mode"] = "ofdm_toa";
    c["requirements"] = {{"rate_bps_hz", 3.0}, {"q_m2", 3600.0}};
    c["ofdm"] = {{"subcarriers", 32}, {"blocks", 1}, {"sampling_period_s", 5e-6}, {"paths", 3},
                 {"decay_rate", 1.0}, {"angle_spread_deg", 10.0}, {"seed", 7}};
    c["sweep"] = {{"param", "blocks"}, {"grid", {1, 2, 4}}};
    c["modes"] = kAllModes;
    return c;
  }
  if (id == "table1") {
    json c = corners_line(0.0);
    c["region_side_m"] = 5000.0;
    c["ms"] = json::array({{{"x", 2500.0}, {"y", 2500.0}}});
    c["params"]["beta_hz"] = 5.2e6;
    c["params"]["n0_dbm_per_hz"] = -112.5;
    c["params"]["pathloss_ref"] = {{"db", -135.0}, {"at_m", 5000.0}};
    c["mode"] = "toa_flat";
    c["requirements"] = {{"rate_bps_hz", 5.0}, {"q_m2", 100.0 * 100.0}};
    c["modes"] = kAllModes;
    return c;
  }
  throw InvalidArgument("unknown figure '" + id + "'");
}

std::vector<double> mean_power(const std::vector<ResultRow>& rows, ConstraintMode mode,
                               const std::vector<double>& grid) {
  std::vector<double> out;
  for (double g : grid) {
    double sum = 0.0;
    int n = 0;
    bool ok = true;
    for (const auto& r : rows) {
      if (r.mode != mode || r.sweep != g) continue;
      ok = ok && r.status == optimizer::Status::kFeasible;
      sum += r.total_power_w;
      ++n;
    }
    out.push_back(ok && n > 0 ? sum / n : std::nan(""));
  }
  return out;
}

bool non_increasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] <= v[k - 1] + tol * std::abs(v[k - 1]))) return false;
  }
  return !v.empty();
}

bool non_decreasing(const std::vector<double>& v, double tol) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] >= v[k - 1] - tol * std::abs(v[k - 1]))) return false;
  }
  return !v.empty();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return !v.empty();
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return !v.empty();
}

FigureResult run(const std::string& id, const harness::RunOptions& options) {
  FigureResult f;
  f.id = id;
  const json cj = figure_config(id);
  f.config = harness::parse_config(cj);
  f.rows = harness::run_scenario(f.config, options).rows;
  const auto& grid = f.config.sweep_grid;
  f.verdicts.push_back(all_feasible(f.rows));

  if (id == "fig2") {
    const auto rate = mean_power(f.rows, ConstraintMode::kRateOnly, grid);
    const auto loc = mean_power(f.rows, ConstraintMode::kLocOnly, grid);
    f.verdicts.push_back(monotone("rate-only power strictly decreasing in separation", rate, strictly_decreasing(rate)));
    f.verdicts.push_back(monotone("loc-only power strictly increasing in separation", loc, strictly_increasing(loc)));
    f.verdicts.push_back(joint_dominates(f.rows, grid));
  } else if (id == "fig3") {
    for (ConstraintMode m : f.config.modes) {
      const auto p = mean_power(f.rows, m, grid);
      f.verdicts.push_back(monotone(harness::to_string(m) + " mean power non-increasing in N_B", p, non_increasing(p)));
    }
  } else if (id == "fig4") {
    for (ConstraintMode m : f.config.modes) {
      const auto p = mean_power(f.rows, m, grid);
      f.verdicts.push_back(monotone(harness::to_string(m) + " mean power non-decreasing in N_M", p, non_decreasing(p)));
    }
  } else if (id == "fig5") {
    bool per_trial = true;
    for (int t = 0; t < f.config.trials; ++t) {
      std::vector<ResultRow> mine;
      for (const auto& r : f.rows) {
        if (r.trial == t) mine.push_back(r);
      }
      per_trial = per_trial && non_decreasing(mean_power(mine, ConstraintMode::kBoth, grid));
    }
    const auto p = mean_power(f.rows, ConstraintMode::kBoth, grid);
    f.verdicts.push_back(monotone("robust power non-decreasing in epsilon (every trial)", p, per_trial));
    json rj = cj;
    rj["mode"] = "toa_flat";
    rj.erase("sweep");
    rj.erase("uncertainty");
    const auto rc = harness::parse_config(rj);
    f.reference = harness::run_scenario(rc, options).rows;
    double worst = 0.0;
    bool ok = true;
    for (int t = 0; t < f.config.trials; ++t) {
      double robust = std::nan(""), nominal = std::nan("");
      for (const auto& r : f.rows) {
        if (r.trial == t && r.sweep == 0.0) robust = r.total_power_w;
      }
      for (const auto& r : f.reference) {
        if (r.trial == t) nominal = r.total_power_w;
      }
      const double rel = std::abs(robust - nominal) / nominal;
      ok = ok && rel <= 1e-3;
      worst = std::max(worst, std::isnan(rel) ? kInf : rel);
    }
    f.verdicts.push_back({"robust power at epsilon 0 matches the non-robust design within 1e-3", ok,
                          "worst relative gap " + harness::format_number(worst)});
  } else if (id == "fig6") {
    const auto p = mean_power(f.rows, ConstraintMode::kBoth, grid);
    f.verdicts.push_back(monotone("TDOA power non-increasing in K_b", p, non_increasing(p)));
    json rj = cj;
    rj["mode"] = "toa_flat";
    rj.erase("sweep");
    const auto rc = harness::parse_config(rj);
    f.reference = harness::run_scenario(rc, options).rows;
    const double toa = f.reference.front().total_power_w;
    const double rel = std::abs(p.back() - toa) / toa;
    f.verdicts.push_back({"largest K_b within 5% of TOA power", rel <= 0.05,
                          harness::format_number(p.back()) + " vs " + harness::format_number(toa)});
  } else if (id == "fig7") {
    const auto rate = mean_power(f.rows, ConstraintMode::kRateOnly, grid);
    const auto loc = mean_power(f.rows, ConstraintMode::kLocOnly, grid);
    f.verdicts.push_back(monotone("rate-only power non-increasing in N_C", rate, non_increasing(rate)));
    f.verdicts.push_back(monotone("loc-only power non-decreasing in N_C", loc, non_decreasing(loc)));
    f.verdicts.push_back(joint_dominates(f.rows, grid));
    const bool rejected = localizability_rejected(32, 16, 3) && localizability_rejected(32, 8, 4);
    f.verdicts.push_back({"block size <= path count rejected", rejected, "N=32: (N_C, L) = (16, 3) and (8, 4)"});
  } else if (id == "table1") {
    f.verdicts.push_back(joint_dominates(f.rows, grid));
  }
  return f;
}

}  // namespace locbeam::reproduce
