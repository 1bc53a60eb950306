// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "locbeam/harness.hpp"

namespace locbeam::reproduce {

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct FigureResult {
  std::string id;
  harness::ScenarioConfig config;
  std::vector<harness::ResultRow> rows;
  // Comparison runs (TOA reference for fig6, non-robust design for fig5).
  std::vector<harness::ResultRow> reference;
  std::vector<Verdict> verdicts;
  bool passed() const;
};

const std::vector<std::string>& figure_ids();

// Desk-scale set-ups, also usable as `locbeam solve` input.
nlohmann::json figure_config(const std::string& id);

// Mean power per sweep point over trials for one constraint mode; NaN when a trial is not
// feasible.
std::vector<double> mean_power(const std::vector<harness::ResultRow>& rows, harness::ConstraintMode mode,
                               const std::vector<double>& grid);

// Monotonicity with a relative slack: a step may move against the trend by at most tol * |value|.
bool non_increasing(const std::vector<double>& v, double tol = 1e-6);
bool non_decreasing(const std::vector<double>& v, double tol = 1e-6);
bool strictly_decreasing(const std::vector<double>& v);
bool strictly_increasing(const std::vector<double>& v);

FigureResult run(const std::string& id, const harness::RunOptions& options = {});

}  // namespace locbeam::reproduce
