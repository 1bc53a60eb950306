// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "locbeam/channel.hpp"
#include "locbeam/conic.hpp"
#include "locbeam/covariance.hpp"
#include "locbeam/scene.hpp"

namespace locbeam::optimizer {

enum class Mode { kToaFlat, kTdoaFlat, kRobustToa, kRobustTdoa, kOfdmToa };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

enum class TdoaMethod { kAuto, kBound, kBlock, kMinorant };
std::string to_string(TdoaMethod m);
TdoaMethod tdoa_method_from_string(const std::string& s);

// Everything a solve needs: geometry, parameters, requirements and the channel description used
// by the selected mode.
struct Scenario {
  Mode mode = Mode::kToaFlat;
  scene::Topology topology;
  scene::SystemParams params;
  scene::Requirements requirements;
  channel::FlatChannelSet flat;
  channel::SelectiveChannelSet selective;
  channel::ChannelStats stats;
  scene::UncertaintyModel uncertainty;

  int n_bs() const { return topology.n_bs(); }
  int n_ms() const { return topology.n_ms(); }
  int n_blocks() const { return mode == Mode::kOfdmToa ? params.blocks : 1; }
  void validate() const;
};

Scenario flat_scenario(Mode mode, const scene::Topology& topology, const scene::SystemParams& params,
                       const scene::Requirements& requirements);
// Angle half-width in radians; distance half-width in meters.
Scenario robust_scenario(Mode mode, const scene::Topology& topology, const scene::SystemParams& params,
                         const scene::Requirements& requirements, double distance_halfwidth,
                         double angle_halfwidth, int n_samples = 1001);
Scenario ofdm_scenario(const scene::Topology& topology, const scene::SystemParams& params,
                       const scene::Requirements& requirements, const channel::SelectiveOptions& options);

struct Options {
  // Initial covariance power per (BS, MS) pair, in units of the noise-to-median-gain power.
  double initial_power = 1.0;
  double delta_th = 1e-5;
  int max_outer = 50;
  double delta_inc = 0.05;
  double rescale_cap = 1e6;
  double tol_feas = 1e-6;
  TdoaMethod tdoa_method = TdoaMethod::kAuto;
  conic::SolverOptions solver;
  bool record_iterates = false;
};

struct ConstraintReport {
  std::vector<double> rate;
  std::vector<double> rate_slack;
  std::vector<double> crb;
  std::vector<double> crb_slack;
  bool feasible = false;
  double worst_slack = 0.0;
};

// True rates and CRBs of the scenario's mode; rate slack is absolute, CRB slack relative to Q.
ConstraintReport check_feasibility(const CovarianceSet& cov, const Scenario& scenario, double tol_feas = 1e-6);
ConstraintReport check_feasibility(const BeamformerSet& w, const Scenario& scenario, double tol_feas = 1e-6);

enum class Status { kFeasible, kInfeasible, kMaxIters, kRankReductionFailure };
std::string to_string(Status s);

struct SolveReport {
  Status status = Status::kInfeasible;
  BeamformerSet beamformers;
  // Relaxed covariance solution in watts.
  CovarianceSet covariances;
  double total_power = 0.0;
  std::vector<double> bs_power;
  ConstraintReport constraints;
  // Objective (watts) after each outer iteration.
  std::vector<double> objective_trace;
  std::vector<CovarianceSet> iterates;
  double rescale_factor = 1.0;
  int iterations = 0;
  std::string tdoa_method;
  std::string message;
};

// Transmit power as reported: sum of traces, divided by the block count in OFDM mode.
double reported_power(const CovarianceSet& cov, const Scenario& scenario);

SolveReport solve_toa_flat(const Scenario& scenario, const Options& options = {});
SolveReport solve_tdoa_flat(const Scenario& scenario, const Options& options = {});
SolveReport solve_robust(const Scenario& scenario, const Options& options = {});
SolveReport solve_ofdm(const Scenario& scenario, const Options& options = {});
SolveReport solve(const Scenario& scenario, const Options& options = {});

// Principal eigenpair sqrt(lambda) v, first nonzero entry real positive; ties resolved towards
// the lowest-index unit vectors.
CVector rank_reduce(const CMatrix& sigma);

struct RescaleResult {
  BeamformerSet beamformers;
  double factor = 1.0;
  bool success = false;
  ConstraintReport constraints;
};
RescaleResult rescale_to_feasible(const BeamformerSet& w, const Scenario& scenario, double delta_inc = 0.05,
                                  double cap = 1e6, double tol_feas = 1e-6);

}  // namespace locbeam::optimizer
