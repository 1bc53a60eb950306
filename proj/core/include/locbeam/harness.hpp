// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "locbeam/error.hpp"
#include "locbeam/optimizer.hpp"

namespace locbeam::harness {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

enum class ConstraintMode { kRateOnly, kLocOnly, kBoth };
std::string to_string(ConstraintMode m);
ConstraintMode constraint_mode_from_string(const std::string& s);

enum class BsLayout { kCorners, kUniform, kList };
enum class MsLayout { kUniform, kLine, kList };

// Parsed scenario JSON plus the sweep description.
struct ScenarioConfig {
  double region_side = 200.0;
  BsLayout bs_layout = BsLayout::kCorners;
  int n_bs = 4;
  int antennas = 4;
  std::vector<scene::Position> bs;
  std::vector<int> bs_antennas;
  MsLayout ms_layout = MsLayout::kList;
  int n_ms = 1;
  double line_offset = 0.3;
  std::vector<scene::Position> ms;

  scene::SystemParams params;
  double pathloss_db = -110.0;
  double pathloss_at_m = 100.0;
  std::vector<double> rate;
  std::vector<double> accuracy;
  optimizer::Mode mode = optimizer::Mode::kToaFlat;

  bool has_uncertainty = false;
  double distance_halfwidth = 0.0;
  double angle_halfwidth = 0.0;
  int uncertainty_samples = 1001;

  channel::SelectiveOptions ofdm;
  optimizer::Options options;

  // Empty name means a single run at sweep value 0.
  std::string sweep_param;
  std::vector<double> sweep_grid{0.0};
  std::vector<ConstraintMode> modes{ConstraintMode::kBoth};
  int trials = 1;
  std::uint64_t seed = 1;

  // Optional stored beamformers, evaluated by `locbeam crb`.
  nlohmann::json beamformers;
};

// Recognized sweep parameters: ms_offset, clock_prior, epsilon, blocks, n_bs, n_ms, rate,
// accuracy_m2, antennas.
const std::vector<std::string>& sweep_parameters();

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Scenario for one (sweep value, constraint mode, trial) combination.
optimizer::Scenario build_scenario(const ScenarioConfig& config, double sweep_value, ConstraintMode mode,
                                   int trial);

struct ResultRow {
  double sweep = 0.0;
  ConstraintMode mode = ConstraintMode::kBoth;
  int trial = 0;
  optimizer::Status status = optimizer::Status::kInfeasible;
  double total_power_w = 0.0;
  double per_bs_power_w = 0.0;
  std::vector<double> rate;
  std::vector<double> crb;
  int iterations = 0;
  double wall_ms = 0.0;
  double rescale_factor = 1.0;
  std::string tdoa_method;
  std::string message;
};

struct RunOptions {
  // Writes 0 in the wall_ms column so repeated runs produce identical files.
  bool record_timing = true;
  bool keep_reports = false;
};

struct RunResult {
  std::vector<ResultRow> rows;
  std::vector<optimizer::SolveReport> reports;
};

// Rows ordered by (sweep index, mode, trial). Solver failures are reported per row.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& run = {});

extern const char* const kCsvHeader;
// One line per (row, MS).
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string format_number(double v);

nlohmann::json beamformers_to_json(const BeamformerSet& w);
BeamformerSet beamformers_from_json(const nlohmann::json& j, const std::vector<int>& antennas, int n_ms,
                                    int n_blocks);
// Sidecar document with the beamformers of every row.
nlohmann::json solutions_to_json(const RunResult& result);

struct CrbEntry {
  double sweep = 0.0;
  ConstraintMode mode = ConstraintMode::kBoth;
  int trial = 0;
  optimizer::ConstraintReport report;
};
// Re-evaluates stored solutions against scenarios rebuilt from the config.
std::vector<CrbEntry> evaluate_solutions(const ScenarioConfig& config, const nlohmann::json& solutions);

enum class DbmDirection { kWattsToDbm, kDbmToWatts };
double dbm_conversion(double value, DbmDirection direction);

}  // namespace locbeam::harness
