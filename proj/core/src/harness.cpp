// SPDX-License-Identifier: Apache-2.0
#include "locbeam/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#include "locbeam/units.hpp"

namespace locbeam::harness {

using nlohmann::json;

const char* const kCsvHeader =
    "sweep,mode,trial,status,total_power_w,total_power_dbm,per_bs_power_w,ms_index,rate_bps_hz,crb_m2,iters,wall_ms";

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

ResultRow row_from_report(const optimizer::SolveReport& r, const optimizer::Scenario& sc) {
  ResultRow row;
  row.status = r.status;
  row.total_power_w = r.total_power;
  row.per_bs_power_w = r.total_power / sc.n_bs();
  row.iterations = r.iterations;
  row.rescale_factor = r.rescale_factor;
  row.tdoa_method = r.tdoa_method;
  row.message = r.message;
  row.rate = r.constraints.rate;
  row.crb = r.constraints.crb;
  return row;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& run) {
  RunResult out;
  for (double value : config.sweep_grid) {
    for (ConstraintMode mode : config.modes) {
      for (int trial = 0; trial < config.trials; ++trial) {
        const auto start = std::chrono::steady_clock::now();
        optimizer::SolveReport report;
        ResultRow row;
        try {
          const optimizer::Scenario sc = build_scenario(config, value, mode, trial);
          report = optimizer::solve(sc, config.options);
          row = row_from_report(report, sc);
        } catch (const ConfigError&) {
          throw;
        } catch (const Error& e) {
          row.status = optimizer::Status::kInfeasible;
          row.message = e.what();
          report.status = row.status;
          report.message = row.message;
        }
        const auto stop = std::chrono::steady_clock::now();
        row.sweep = value;
        row.mode = mode;
        row.trial = trial;
        row.wall_ms = run.record_timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
        out.rows.push_back(std::move(row));
        if (run.keep_reports) out.reports.push_back(std::move(report));
      }
    }
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    const std::string prefix = format_number(r.sweep) + ',' + to_string(r.mode) + ',' + std::to_string(r.trial) +
                               ',' + optimizer::to_string(r.status) + ',' + format_number(r.total_power_w) + ',' +
                               format_number(r.total_power_w > 0.0 ? watts_to_dbm(r.total_power_w) : -kInf) +
                               ',' + format_number(r.per_bs_power_w);
    const std::size_t n = std::max(r.rate.size(), r.crb.size());
    const std::string suffix = ',' + std::to_string(r.iterations) + ',' + format_number(std::round(r.wall_ms));
    if (n == 0) {
      out << prefix << ",-1,nan,nan" << suffix << '\n';
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = i < r.rate.size() ? r.rate[i] : std::nan("");
      const double crb = i < r.crb.size() ? r.crb[i] : std::nan("");
      out << prefix << ',' << i << ',' << format_number(rate) << ',' << format_number(crb) << suffix << '\n';
    }
  }
}

json solutions_to_json(const RunResult& result) {
  json out = json::array();
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    const ResultRow& r = result.rows[k];
    json e = {{"sweep", r.sweep},
              {"mode", to_string(r.mode)},
              {"trial", r.trial},
              {"status", optimizer::to_string(r.status)},
              {"total_power_w", r.total_power_w},
              {"rescale_factor", r.rescale_factor}};
    if (!r.tdoa_method.empty()) e["tdoa_method"] = r.tdoa_method;
    if (k < result.reports.size() && result.reports[k].beamformers.n_bs() > 0) {
      e["beamformers"] = beamformers_to_json(result.reports[k].beamformers);
    } else {
      e["beamformers"] = json::array();
    }
    out.push_back(std::move(e));
  }
  return json{{"solutions", out}};
}

std::vector<CrbEntry> evaluate_solutions(const ScenarioConfig& config, const json& solutions) {
  std::vector<CrbEntry> out;
  auto evaluate = [&](double sweep, ConstraintMode mode, int trial, const json& bf) {
    const optimizer::Scenario sc = build_scenario(config, sweep, mode, trial);
    std::vector<int> antennas;
    for (int j = 0; j < sc.n_bs(); ++j) antennas.push_back(sc.topology.antennas(j));
    const BeamformerSet w = beamformers_from_json(bf, antennas, sc.n_ms(), sc.n_blocks());
    CrbEntry e;
    e.sweep = sweep;
    e.mode = mode;
    e.trial = trial;
    e.report = optimizer::check_feasibility(w, sc, config.options.tol_feas);
    out.push_back(std::move(e));
  };
  try {
    if (solutions.is_object() && solutions.contains("solutions")) {
      for (const json& s : solutions.at("solutions")) {
        if (s.at("beamformers").empty()) continue;
        evaluate(s.at("sweep").get<double>(), constraint_mode_from_string(s.at("mode").get<std::string>()),
                 s.at("trial").get<int>(), s.at("beamformers"));
      }
    } else {
      evaluate(config.sweep_grid.front(), config.modes.front(), 0, solutions);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed solutions: ") + e.what());
  }
  return out;
}

}  // namespace locbeam::harness
