// SPDX-License-Identifier: Apache-2.0
#include "locbeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "locbeam/error.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/rate.hpp"
#include "subproblem.hpp"

namespace locbeam::optimizer {

namespace {

using detail::LocalizationSpec;
using detail::SubproblemSpec;

// Normalized problem data: covariances are measured in units of `power_unit` watts so that the
// median link SNR of a unit-power covariance is one.
struct Context {
  const Scenario* sc = nullptr;
  double power_unit = 1.0;
  GainTable rate;
  GainTable loc;
  double prefactor = 0.0;
  double kappa = 1.0;
  double weight = 1.0;
  std::vector<Mat2> direction_of(int ms) const;
  std::vector<Mat2> pairs_of(int ms) const;
};

std::vector<Mat2> Context::direction_of(int ms) const {
  std::vector<Mat2> d;
  for (int j = 0; j < sc->n_bs(); ++j) {
    if (sc->mode == Mode::kRobustToa || sc->mode == Mode::kRobustTdoa) {
      const auto& l = sc->uncertainty.at(j, ms);
      d.push_back(fim::q_phi_toa(l.nominal_angle, l.angle_halfwidth));
    } else {
      d.push_back(fim::j_phi(sc->topology.link(j, ms).angle));
    }
  }
  return d;
}

std::vector<Mat2> Context::pairs_of(int ms) const {
  const int n = sc->n_bs();
  std::vector<Mat2> p(n * n, Mat2::Zero());
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      if (sc->mode == Mode::kRobustTdoa) {
        const auto& a = sc->uncertainty.at(j, ms);
        const auto& b = sc->uncertainty.at(l, ms);
        p[j * n + l] = fim::q_phi_tdoa(a.nominal_angle, b.nominal_angle, a.angle_halfwidth, b.angle_halfwidth);
      } else {
        p[j * n + l] = fim::j_phi_pair(sc->topology.link(j, ms).angle, sc->topology.link(l, ms).angle);
      }
    }
  }
  return p;
}

double median_link_gain(const GainTable& g) {
  std::vector<double> v;
  for (int j = 0; j < g.n_bs; ++j) {
    for (int i = 0; i < g.n_ms; ++i) {
      double acc = 0.0;
      for (int s = 0; s < g.n_slots; ++s) acc += g.at(j, i, s).trace().real();
      v.push_back(acc / g.n_slots);
    }
  }
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

Context make_context(const Scenario& sc) {
  Context c;
  c.sc = &sc;
  GainTable rate_w, loc_w;
  switch (sc.mode) {
    case Mode::kToaFlat:
    case Mode::kTdoaFlat:
      rate_w = flat_gains(sc.flat);
      loc_w = rate_w;
      c.prefactor = rate::flat_prefactor(sc.params, sc.n_bs());
      c.kappa = sc.params.flat_scale();
      break;
    case Mode::kRobustToa:
    case Mode::kRobustTdoa:
      rate_w = robust_gains(sc.stats, sc.uncertainty);
      loc_w = rate_w;
      c.prefactor = rate::flat_prefactor(sc.params, sc.n_bs());
      c.kappa = sc.params.flat_scale();
      break;
    case Mode::kOfdmToa:
      rate_w = ofdm_rate_gains(sc.selective, sc.params);
      loc_w = ofdm_localization_gains(sc.selective, sc.params);
      c.prefactor = rate::ofdm_prefactor(sc.params, sc.n_bs());
      c.kappa = sc.params.ofdm_scale();
      c.weight = 1.0 / sc.params.blocks;
      break;
  }
  const double g = median_link_gain(rate_w);
  c.power_unit = g > 0.0 ? sc.params.noise_w / g : 1.0;
  const double snr_scale = c.power_unit / sc.params.noise_w;
  c.rate = rate_w.scaled(snr_scale);
  c.loc = loc_w.scaled(snr_scale);
  return c;
}

std::vector<LocalizationSpec> localization_specs(const Context& c, bool tdoa) {
  std::vector<LocalizationSpec> out;
  const auto& req = c.sc->requirements;
  for (int i = 0; i < c.sc->n_ms(); ++i) {
    if (!req.has_accuracy(i)) continue;
    LocalizationSpec l;
    l.ms = i;
    l.gains = &c.loc;
    l.direction = c.direction_of(i);
    l.tdoa = tdoa;
    if (tdoa) {
      l.pair = c.pairs_of(i);
      l.clock_prior = c.sc->params.clock_prior_for(i);
    }
    l.bound = c.kappa * req.accuracy[i];
    out.push_back(std::move(l));
  }
  return out;
}

bool has_rates(const Scenario& sc) {
  for (int i = 0; i < sc.n_ms(); ++i) {
    if (sc.requirements.has_rate(i)) return true;
  }
  return false;
}

bool has_requirements(const Scenario& sc) {
  for (int i = 0; i < sc.n_ms(); ++i) {
    if (sc.requirements.has_rate(i) || sc.requirements.has_accuracy(i)) return true;
  }
  return false;
}

SubproblemSpec base_spec(const Context& c) {
  SubproblemSpec s;
  s.antennas = c.sc->topology.bs_antennas;
  s.n_ms = c.sc->n_ms();
  s.n_blocks = c.sc->n_blocks();
  s.active.assign(c.sc->n_bs(), true);
  s.objective_weight = c.weight;
  s.rate_gains = &c.rate;
  s.rate_prefactor = c.prefactor;
  s.rate_req = c.sc->requirements.rate;
  return s;
}

CovarianceSet to_watts(const CovarianceSet& x, const Context& c) {
  CovarianceSet w = x;
  w.scale(c.power_unit);
  return w;
}

struct MmOutcome {
  Status status = Status::kInfeasible;
  CovarianceSet cov;
  std::vector<double> trace;
  std::vector<CovarianceSet> iterates;
  int iterations = 0;
  std::string message;
};

// Solves one subproblem, retrying once with a looser tolerance after the first outer iteration.
bool solve_step(const detail::Subproblem& sub, const Options& opt, const Vector& warm, bool first,
                conic::ConicSolution& sol, std::string& message) {
  conic::SolverOptions so = opt.solver;
  so.warm_start = warm;
  sol = conic::solve(sub.problem, so);
  if (sol.status == conic::SolveStatus::kOptimal) return true;
  if (first) {
    message = "first subproblem " + conic::to_string(sol.status);
    return false;
  }
  so.tol *= 10.0;
  sol = conic::solve(sub.problem, so);
  if (sol.status == conic::SolveStatus::kOptimal) return true;
  message = "subproblem solver returned " + conic::to_string(sol.status);
  return false;
}

Status failure_status(const conic::ConicSolution& sol) {
  return sol.status == conic::SolveStatus::kInfeasible ? Status::kInfeasible : Status::kMaxIters;
}

double objective_of(const CovarianceSet& x, const Context& c) { return c.weight * x.total_power(); }

// Majorization-minimization over all BSs jointly (TOA-type localization constraints).
MmOutcome run_joint(const Context& c, const std::vector<LocalizationSpec>& loc, const Options& opt) {
  MmOutcome out;
  CovarianceSet cov = CovarianceSet::isotropic(c.sc->topology.bs_antennas, c.sc->n_ms(), c.sc->n_blocks(),
                                               opt.initial_power);
  SubproblemSpec spec = base_spec(c);
  spec.loc = loc;
  const bool single = !has_rates(*c.sc);
  Vector warm;
  double prev = kInf;
  out.status = Status::kMaxIters;
  for (int it = 0; it < opt.max_outer; ++it) {
    spec.expansion = &cov;
    const detail::Subproblem sub = detail::build_subproblem(spec);
    conic::ConicSolution sol;
    if (!solve_step(sub, opt, warm, it == 0, sol, out.message)) {
      if (it == 0) {
        out.status = failure_status(sol);
        return out;
      }
      out.status = Status::kMaxIters;
      break;
    }
    const CovarianceSet next = sub.extract(sol.x, cov);
    const double obj = objective_of(next, c);
    const double change = frobenius_distance(next, cov);
    cov = next;
    warm = sol.x;
    out.cov = cov;
    out.trace.push_back(obj * c.power_unit);
    if (opt.record_iterates) out.iterates.push_back(to_watts(cov, c));
    out.iterations = it + 1;
    const bool converged = change < opt.delta_th * std::max(1.0, cov.total_power()) ||
                           std::abs(prev - obj) <= 1e-7 * std::max(std::abs(obj), 1e-300);
    prev = obj;
    if (single || converged) {
      out.status = Status::kFeasible;
      break;
    }
  }
  if (out.iterations == 0) out.status = Status::kInfeasible;
  return out;
}

// Block-coordinate scheme: one BS at a time with the TDOA denominator frozen at the current point.
MmOutcome run_block(const Context& c, const std::vector<LocalizationSpec>& loc, const Options& opt,
                    const CovarianceSet* start = nullptr) {
  MmOutcome out;
  const int n_bs = c.sc->n_bs();
  CovarianceSet cov = start ? *start
                            : CovarianceSet::isotropic(c.sc->topology.bs_antennas, c.sc->n_ms(), c.sc->n_blocks(),
                                                       opt.initial_power);
  SubproblemSpec spec = base_spec(c);
  spec.loc = loc;
  std::map<int, Vector> warm;
  double prev = kInf;
  out.status = Status::kMaxIters;
  for (int it = 0; it < opt.max_outer; ++it) {
    const CovarianceSet start = cov;
    bool failed = false;
    for (int j = 0; j < n_bs; ++j) {
      spec.active.assign(n_bs, false);
      spec.active[j] = true;
      spec.expansion = &cov;
      const detail::Subproblem sub = detail::build_subproblem(spec);
      conic::ConicSolution sol;
      if (!solve_step(sub, opt, warm[j], it == 0 && j == 0, sol, out.message)) {
        if (it == 0 && j == 0) {
          out.status = failure_status(sol);
          return out;
        }
        failed = true;
        break;
      }
      cov = sub.extract(sol.x, cov);
      warm[j] = sol.x;
    }
    if (failed) {
      if (it == 0) {
        out.status = Status::kInfeasible;
        return out;
      }
      out.status = Status::kMaxIters;
      break;
    }
    const double obj = objective_of(cov, c);
    const double change = frobenius_distance(cov, start);
    out.cov = cov;
    out.trace.push_back(obj * c.power_unit);
    if (opt.record_iterates) out.iterates.push_back(to_watts(cov, c));
    out.iterations = it + 1;
    const bool feasible = check_feasibility(to_watts(cov, c), *c.sc, opt.tol_feas).feasible;
    const bool converged = change < opt.delta_th * std::max(1.0, cov.total_power()) ||
                           std::abs(prev - obj) <= 1e-9 * std::max(std::abs(obj), 1e-300);
    const bool settled = std::abs(prev - obj) <= 1e-5 * std::max(std::abs(obj), 1e-300);
    prev = obj;
    if (feasible && (converged || settled)) {
      out.status = Status::kFeasible;
      break;
    }
  }
  return out;
}

SolveReport zero_report(const Scenario& sc) {
  SolveReport r;
  const auto& ant = sc.topology.bs_antennas;
  r.beamformers = BeamformerSet(ant, sc.n_ms(), sc.n_blocks());
  r.covariances = CovarianceSet(ant, sc.n_ms(), sc.n_blocks());
  r.bs_power.assign(sc.n_bs(), 0.0);
  r.constraints = check_feasibility(r.covariances, sc);
  r.status = r.constraints.feasible ? Status::kFeasible : Status::kInfeasible;
  return r;
}

SolveReport finalize(const Context& c, const MmOutcome& mm, const Options& opt) {
  const Scenario& sc = *c.sc;
  SolveReport r;
  r.objective_trace = mm.trace;
  r.iterates = mm.iterates;
  r.iterations = mm.iterations;
  r.message = mm.message;
  r.bs_power.assign(sc.n_bs(), 0.0);
  if (mm.iterations == 0) {
    r.status = mm.status == Status::kFeasible ? Status::kInfeasible : mm.status;
    r.covariances = CovarianceSet(sc.topology.bs_antennas, sc.n_ms(), sc.n_blocks());
    r.beamformers = BeamformerSet(sc.topology.bs_antennas, sc.n_ms(), sc.n_blocks());
    r.constraints = check_feasibility(r.covariances, sc, opt.tol_feas);
    return r;
  }
  r.covariances = to_watts(mm.cov, c);
  BeamformerSet w(sc.topology.bs_antennas, sc.n_ms(), sc.n_blocks());
  for (int j = 0; j < sc.n_bs(); ++j) {
    for (int i = 0; i < sc.n_ms(); ++i) {
      for (int b = 0; b < sc.n_blocks(); ++b) w.at(j, i, b) = rank_reduce(r.covariances.at(j, i, b));
    }
  }
  const RescaleResult rs = rescale_to_feasible(w, sc, opt.delta_inc, opt.rescale_cap, opt.tol_feas);
  r.beamformers = rs.beamformers;
  r.rescale_factor = rs.factor;
  r.constraints = rs.constraints;
  const double blocks = sc.n_blocks();
  r.total_power = r.beamformers.total_power() / blocks;
  for (int j = 0; j < sc.n_bs(); ++j) r.bs_power[j] = r.beamformers.bs_power(j) / blocks;
  if (!rs.success) {
    r.status = Status::kRankReductionFailure;
    if (r.message.empty()) r.message = "rescaling cap reached";
  } else {
    r.status = mm.status == Status::kFeasible ? Status::kFeasible : mm.status;
  }
  return r;
}

void require_mode(const Scenario& sc, std::initializer_list<Mode> modes, const char* op) {
  for (Mode m : modes) {
    if (sc.mode == m) return;
  }
  throw InvalidArgument(std::string(op) + ": scenario mode " + to_string(sc.mode) + " not supported");
}

bool bound_applicable(const Scenario& sc) {
  double snr_max = 0.0;
  for (int j = 0; j < sc.n_bs(); ++j) {
    for (int i = 0; i < sc.n_ms(); ++i) {
      const double z = sc.flat.zeta_at(j, i);
      snr_max = std::max(snr_max, z * z * sc.flat.at(j, i).squaredNorm() / sc.params.noise_w);
    }
  }
  const double threshold = 10.0 * sc.n_bs() * sc.n_ms() * snr_max;
  for (int i = 0; i < sc.n_ms(); ++i) {
    if (sc.requirements.has_accuracy(i) && !(sc.params.clock_prior_for(i) >= threshold)) return false;
  }
  return true;
}

SolveReport solve_bound_variant(const Context& c, const Options& opt) {
  const Scenario& sc = *c.sc;
  std::vector<LocalizationSpec> loc = localization_specs(c, false);
  const CovarianceSet zero(sc.topology.bs_antennas, sc.n_ms(), 1);
  for (LocalizationSpec& l : loc) {
    const double kb = sc.params.clock_prior_for(l.ms);
    if (!(kb > 0.0)) throw InvalidArgument("bound variant needs a positive clock prior");
    const fim::Efim e = fim::efim_tdoa_lower_bound(zero, sc.flat, sc.topology, sc.params, l.ms, kb);
    l.subtract = -e.normalized;
  }
  SolveReport r = finalize(c, run_joint(c, loc, opt), opt);
  r.tdoa_method = "bound";
  return r;
}

SolveReport solve_block_variant(const Context& c, const Options& opt) {
  SolveReport r = finalize(c, run_block(c, localization_specs(c, true), opt), opt);
  r.tdoa_method = "block";
  return r;
}

// Starts from the rank-1 solution of `seed` when it is feasible, else from the isotropic point.
SolveReport solve_minorant_variant(const Context& c, const Options& opt, const SolveReport& seed) {
  std::vector<LocalizationSpec> loc = localization_specs(c, true);
  for (LocalizationSpec& l : loc) l.minorant = true;
  CovarianceSet start;
  const bool seeded = seed.status == Status::kFeasible;
  if (seeded) {
    start = seed.beamformers.covariances();
    start.scale(1.0 / c.power_unit);
  }
  SolveReport r = finalize(c, run_block(c, loc, opt, seeded ? &start : nullptr), opt);
  r.tdoa_method = "minorant";
  return r;
}

}  // namespace

SolveReport solve_toa_flat(const Scenario& scenario, const Options& options) {
  require_mode(scenario, {Mode::kToaFlat}, "solve_toa_flat");
  scenario.validate();
  if (!has_requirements(scenario)) return zero_report(scenario);
  const Context c = make_context(scenario);
  return finalize(c, run_joint(c, localization_specs(c, false), options), options);
}

SolveReport solve_tdoa_flat(const Scenario& scenario, const Options& options) {
  require_mode(scenario, {Mode::kTdoaFlat}, "solve_tdoa_flat");
  scenario.validate();
  if (!has_requirements(scenario)) return zero_report(scenario);
  const Context c = make_context(scenario);
  bool any_loc = false;
  for (int i = 0; i < scenario.n_ms(); ++i) any_loc = any_loc || scenario.requirements.has_accuracy(i);
  if (!any_loc) {
    SolveReport r = finalize(c, run_joint(c, {}, options), options);
    r.tdoa_method = "none";
    return r;
  }
  switch (options.tdoa_method) {
    case TdoaMethod::kBound:
      return solve_bound_variant(c, options);
    case TdoaMethod::kBlock:
      return solve_block_variant(c, options);
    case TdoaMethod::kMinorant:
      return solve_minorant_variant(c, options, solve_block_variant(c, options));
    case TdoaMethod::kAuto:
      break;
  }
  std::vector<SolveReport> candidates;
  candidates.push_back(solve_block_variant(c, options));
  if (bound_applicable(scenario)) candidates.push_back(solve_bound_variant(c, options));
  {
    // seed designed without the clock prior, re-checked against the actual one
    Scenario no_prior = scenario;
    no_prior.params.clock_prior.assign(1, 0.0);
    const Context c0 = make_context(no_prior);
    SolveReport r = solve_block_variant(c0, options);
    if (r.status == Status::kFeasible) {
      r.constraints = check_feasibility(r.beamformers, scenario, options.tol_feas);
      if (!r.constraints.feasible) r.status = Status::kInfeasible;
      candidates.push_back(std::move(r));
    }
  }
  auto best = [&] {
    std::size_t b = 0;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
      const bool kf = candidates[k].status == Status::kFeasible;
      const bool bf = candidates[b].status == Status::kFeasible;
      if (kf && (!bf || candidates[k].total_power < candidates[b].total_power)) b = k;
    }
    return b;
  };
  candidates.push_back(solve_minorant_variant(c, options, candidates[best()]));
  return std::move(candidates[best()]);
}

SolveReport solve_robust(const Scenario& scenario, const Options& options) {
  require_mode(scenario, {Mode::kRobustToa, Mode::kRobustTdoa}, "solve_robust");
  scenario.validate();
  if (!has_requirements(scenario)) return zero_report(scenario);
  const Context c = make_context(scenario);
  const bool tdoa = scenario.mode == Mode::kRobustTdoa;
  bool any_loc = false;
  for (int i = 0; i < scenario.n_ms(); ++i) any_loc = any_loc || scenario.requirements.has_accuracy(i);
  const auto loc = localization_specs(c, tdoa);
  SolveReport r = finalize(c, tdoa && any_loc ? run_block(c, loc, options) : run_joint(c, loc, options), options);
  if (r.status == Status::kInfeasible && any_loc) {
    bool indefinite = false;
    for (const auto& l : loc) {
      for (const Mat2& d : l.direction) indefinite = indefinite || Eigen::SelfAdjointEigenSolver<Mat2>(d).eigenvalues()(0) < 0.0;
    }
    if (indefinite) r.message += "; robust direction matrices are indefinite, the uncertainty set may be too wide";
  }
  return r;
}

SolveReport solve_ofdm(const Scenario& scenario, const Options& options) {
  require_mode(scenario, {Mode::kOfdmToa}, "solve_ofdm");
  scenario.validate();
  for (int i = 0; i < scenario.n_ms(); ++i) {
    if (scenario.requirements.has_accuracy(i) && scenario.params.block_size() <= scenario.params.paths_for(i)) {
      throw LocalizabilityError("subcarriers per block must exceed the path count for localization");
    }
  }
  if (!has_requirements(scenario)) return zero_report(scenario);
  const Context c = make_context(scenario);
  return finalize(c, run_joint(c, localization_specs(c, false), options), options);
}

SolveReport solve(const Scenario& scenario, const Options& options) {
  switch (scenario.mode) {
    case Mode::kToaFlat:
      return solve_toa_flat(scenario, options);
    case Mode::kTdoaFlat:
      return solve_tdoa_flat(scenario, options);
    case Mode::kRobustToa:
    case Mode::kRobustTdoa:
      return solve_robust(scenario, options);
    case Mode::kOfdmToa:
      return solve_ofdm(scenario, options);
  }
  throw InvalidArgument("unknown mode");
}

}  // namespace locbeam::optimizer
