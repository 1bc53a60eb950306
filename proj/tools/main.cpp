// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "locbeam/harness.hpp"
#include "locbeam/reproduce.hpp"
#include "locbeam/validate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace locbeam;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadInput = 2;
constexpr int kNumerical = 3;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw harness::ConfigError("cannot write " + path.string());
  out << text;
}

int cmd_solve(const std::string& config_path, const std::string& out_path, const std::string& dump_path,
              bool no_timing) {
  const auto config = harness::load_config(config_path);
  harness::RunOptions run;
  run.record_timing = !no_timing;
  run.keep_reports = !dump_path.empty();
  const auto result = harness::run_scenario(config, run);
  std::ostringstream csv;
  harness::write_csv(csv, result.rows);
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
  }
  if (!dump_path.empty()) write_file(dump_path, harness::solutions_to_json(result).dump(2) + "\n");
  for (const auto& r : result.rows) {
    if (!r.message.empty()) {
      std::cerr << "sweep " << r.sweep << " " << harness::to_string(r.mode) << " trial " << r.trial << ": "
                << r.message << "\n";
    }
  }
  return kOk;
}

int cmd_reproduce(const std::string& id, const std::string& out_dir, bool no_timing) {
  const auto& ids = reproduce::figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::cerr << "unknown figure '" << id << "'\n";
    return kBadInput;
  }
  harness::RunOptions run;
  run.record_timing = !no_timing;
  const auto f = reproduce::run(id, run);
  const fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  harness::write_csv(csv, f.rows);
  write_file(dir / (id + ".csv"), csv.str());
  if (!f.reference.empty()) {
    std::ostringstream ref;
    harness::write_csv(ref, f.reference);
    write_file(dir / (id + "_reference.csv"), ref.str());
  }
  write_file(dir / (id + "_config.json"), reproduce::figure_config(id).dump(2) + "\n");
  std::ostringstream verdicts;
  for (const auto& v : f.verdicts) {
    verdicts << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
  }
  write_file(dir / (id + "_verdicts.txt"), verdicts.str());
  std::cout << verdicts.str();
  return f.passed() ? kOk : kCheckFailed;
}

int cmd_validate(const std::string& suite) {
  const auto report = validate::run(validate::suite_from_string(suite));
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << " [" << c.runtime_s << " s]\n";
  }
  return report.passed() ? kOk : kCheckFailed;
}

int cmd_crb(const std::string& config_path, const std::string& solutions_path) {
  const auto config = harness::load_config(config_path);
  nlohmann::json solutions = config.beamformers;
  if (!solutions_path.empty()) {
    std::ifstream in(solutions_path);
    if (!in) throw harness::ConfigError("cannot open " + solutions_path);
    try {
      solutions = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw harness::ConfigError(std::string("invalid solutions JSON: ") + e.what());
    }
  }
  if (solutions.is_null()) throw harness::ConfigError("no beamformers in the config and no --solutions file");
  const auto entries = harness::evaluate_solutions(config, solutions);
  std::cout << "sweep,mode,trial,ms_index,rate_bps_hz,rate_slack,crb_m2,crb_slack,feasible\n";
  for (const auto& e : entries) {
    const auto& r = e.report;
    for (std::size_t i = 0; i < r.rate.size(); ++i) {
      std::cout << harness::format_number(e.sweep) << ',' << harness::to_string(e.mode) << ',' << e.trial << ','
                << i << ',' << harness::format_number(r.rate[i]) << ',' << harness::format_number(r.rate_slack[i])
                << ',' << harness::format_number(r.crb[i]) << ',' << harness::format_number(r.crb_slack[i]) << ','
                << (r.feasible ? "yes" : "no") << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-minimizing beamforming under rate and localization-accuracy constraints"};
  app.require_subcommand(1);

  std::string config_path, out_path, dump_path, figure, suite = "all", solutions_path;
  bool no_timing = false;

  auto* solve = app.add_subcommand("solve", "Run a scenario file and write result rows as CSV");
  solve->add_option("config", config_path, "Scenario JSON")->required();
  solve->add_option("--out", out_path, "CSV output file (default: stdout)");
  solve->add_option("--dump-solutions", dump_path, "Write beamformers of every row as JSON");
  solve->add_flag("--no-timing", no_timing, "Write 0 in the wall_ms column");

  auto* repro = app.add_subcommand("reproduce", "Run a desk-scale figure set-up and check its trends");
  repro->add_option("figure", figure, "fig2 | fig3 | fig4 | fig5 | fig6 | fig7 | table1")->required();
  repro->add_option("--out", out_path, "Output directory");
  repro->add_flag("--no-timing", no_timing, "Write 0 in the wall_ms column");

  auto* val = app.add_subcommand("validate", "Run oracle and property suites");
  val->add_option("--suite", suite, "oracles | properties | all");

  auto* crb = app.add_subcommand("crb", "Evaluate rates and CRBs of stored beamformers");
  crb->add_option("config", config_path, "Scenario JSON")->required();
  crb->add_option("--solutions", solutions_path, "Solutions file written by solve --dump-solutions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*solve) return cmd_solve(config_path, out_path, dump_path, no_timing);
    if (*repro) return cmd_reproduce(figure, out_path, no_timing);
    if (*val) return cmd_validate(suite);
    if (*crb) return cmd_crb(config_path, solutions_path);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
