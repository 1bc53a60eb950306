// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "locbeam/error.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/optimizer.hpp"
#include "locbeam/rate.hpp"

namespace locbeam::optimizer {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kToaFlat:
      return "toa_flat";
    case Mode::kTdoaFlat:
      return "tdoa_flat";
    case Mode::kRobustToa:
      return "robust_toa";
    case Mode::kRobustTdoa:
      return "robust_tdoa";
    case Mode::kOfdmToa:
      return "ofdm_toa";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::kToaFlat, Mode::kTdoaFlat, Mode::kRobustToa, Mode::kRobustTdoa, Mode::kOfdmToa}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown mode: " + s);
}

std::string to_string(TdoaMethod m) {
  switch (m) {
    case TdoaMethod::kAuto:
      return "auto";
    case TdoaMethod::kBound:
      return "bound";
    case TdoaMethod::kBlock:
      return "block";
    case TdoaMethod::kMinorant:
      return "minorant";
  }
  return "unknown";
}

TdoaMethod tdoa_method_from_string(const std::string& s) {
  for (TdoaMethod m : {TdoaMethod::kAuto, TdoaMethod::kBound, TdoaMethod::kBlock, TdoaMethod::kMinorant}) {
    if (to_string(m) == s) return m;
  }
  throw InvalidArgument("unknown TDOA method: " + s);
}

std::string to_string(Status s) {
  switch (s) {
    case Status::kFeasible:
      return "feasible";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kMaxIters:
      return "max_iters";
    case Status::kRankReductionFailure:
      return "rank_reduction_failure";
  }
  return "unknown";
}

void Scenario::validate() const {
  topology.validate();
  params.validate(mode == Mode::kOfdmToa);
  requirements.validate(n_ms());
  switch (mode) {
    case Mode::kToaFlat:
    case Mode::kTdoaFlat:
      if (flat.n_bs != n_bs() || flat.n_ms != n_ms()) throw DimensionMismatch("flat channels do not match topology");
      break;
    case Mode::kRobustToa:
    case Mode::kRobustTdoa:
      uncertainty.validate();
      if (stats.n_bs != n_bs() || stats.n_ms != n_ms()) throw DimensionMismatch("channel stats do not match topology");
      break;
    case Mode::kOfdmToa:
      if (selective.n_bs != n_bs() || selective.n_ms != n_ms()) {
        throw DimensionMismatch("selective channels do not match topology");
      }
      break;
  }
}

Scenario flat_scenario(Mode mode, const scene::Topology& topology, const scene::SystemParams& params,
                       const scene::Requirements& requirements) {
  if (mode != Mode::kToaFlat && mode != Mode::kTdoaFlat) throw InvalidArgument("flat scenario needs a flat mode");
  Scenario s;
  s.mode = mode;
  s.topology = topology;
  s.params = params;
  s.requirements = requirements;
  s.flat = channel::flat_channels(topology, params);
  s.validate();
  return s;
}

Scenario robust_scenario(Mode mode, const scene::Topology& topology, const scene::SystemParams& params,
                         const scene::Requirements& requirements, double distance_halfwidth,
                         double angle_halfwidth, int n_samples) {
  if (mode != Mode::kRobustToa && mode != Mode::kRobustTdoa) throw InvalidArgument("robust scenario needs a robust mode");
  Scenario s;
  s.mode = mode;
  s.topology = topology;
  s.params = params;
  s.requirements = requirements;
  s.uncertainty = scene::make_uncertainty(topology, params, distance_halfwidth, angle_halfwidth);
  s.stats = channel::robust_stats(topology, s.uncertainty, n_samples);
  s.validate();
  return s;
}

Scenario ofdm_scenario(const scene::Topology& topology, const scene::SystemParams& params,
                       const scene::Requirements& requirements, const channel::SelectiveOptions& options) {
  Scenario s;
  s.mode = Mode::kOfdmToa;
  s.topology = topology;
  s.params = params;
  s.requirements = requirements;
  s.selective = channel::selective_channels(topology, params, options);
  s.validate();
  return s;
}

double reported_power(const CovarianceSet& cov, const Scenario& scenario) {
  return cov.total_power() / scenario.n_blocks();
}

namespace {

fim::CrbResult true_crb(const CovarianceSet& cov, const Scenario& sc, int i) {
  try {
    switch (sc.mode) {
      case Mode::kToaFlat:
        return fim::crb(fim::efim_toa_flat(cov, sc.flat, sc.topology, sc.params, i));
      case Mode::kTdoaFlat:
        return fim::crb(fim::efim_tdoa_flat(cov, sc.flat, sc.topology, sc.params, i, sc.params.clock_prior_for(i)));
      case Mode::kRobustToa:
        return fim::crb(fim::efim_robust(cov, sc.stats, sc.uncertainty, sc.params, i, fim::RobustMode::kToa));
      case Mode::kRobustTdoa:
        return fim::crb(fim::efim_robust(cov, sc.stats, sc.uncertainty, sc.params, i, fim::RobustMode::kTdoa,
                                         sc.params.clock_prior_for(i)));
      case Mode::kOfdmToa:
        return fim::crb(fim::efim_toa_ofdm(cov, sc.selective, sc.topology, sc.params, i));
    }
  } catch (const DegenerateInput&) {
  }
  return fim::CrbResult{};
}

rate::RateReport true_rates(const CovarianceSet& cov, const Scenario& sc) {
  switch (sc.mode) {
    case Mode::kToaFlat:
    case Mode::kTdoaFlat:
      return rate::rate_flat(cov, sc.flat, sc.topology, sc.params);
    case Mode::kRobustToa:
    case Mode::kRobustTdoa:
      return rate::rate_robust(cov, sc.stats, sc.uncertainty, sc.params);
    case Mode::kOfdmToa:
      return rate::rate_ofdm(cov, sc.selective, sc.topology, sc.params);
  }
  throw InvalidArgument("unknown mode");
}

}  // namespace

ConstraintReport check_feasibility(const CovarianceSet& cov, const Scenario& scenario, double tol_feas) {
  const int n_ms = scenario.n_ms();
  const auto& req = scenario.requirements;
  ConstraintReport r;
  const rate::RateReport rates = true_rates(cov, scenario);
  r.worst_slack = kInf;
  for (int i = 0; i < n_ms; ++i) {
    r.rate.push_back(rates.total[i]);
    r.rate_slack.push_back(rates.total[i] - req.rate[i]);
    const double q = req.accuracy[i];
    if (req.has_accuracy(i)) {
      const double c = true_crb(cov, scenario, i).value;
      r.crb.push_back(c);
      r.crb_slack.push_back(std::isfinite(c) ? (q - c) / q : -kInf);
    } else {
      r.crb.push_back(true_crb(cov, scenario, i).value);
      r.crb_slack.push_back(kInf);
    }
    r.worst_slack = std::min({r.worst_slack, r.rate_slack.back(), r.crb_slack.back()});
  }
  r.feasible = r.worst_slack >= -tol_feas;
  return r;
}

ConstraintReport check_feasibility(const BeamformerSet& w, const Scenario& scenario, double tol_feas) {
  return check_feasibility(w.covariances(), scenario, tol_feas);
}

CVector rank_reduce(const CMatrix& sigma) {
  const int n = static_cast<int>(sigma.rows());
  if (n == 0) return CVector();
  const CMatrix h = (sigma + sigma.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Vector& ev = es.eigenvalues();
  const double lmax = ev(n - 1);
  if (!(lmax > 0.0)) return CVector::Zero(n);
  const double tie = 1e-12 * std::max(1.0, std::abs(lmax));
  // projector onto the (possibly repeated) principal eigenspace
  CMatrix proj = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    if (lmax - ev(k) <= tie) proj += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  }
  CVector v = es.eigenvectors().col(n - 1);
  for (int k = 0; k < n; ++k) {
    const CVector cand = proj.col(k);
    if (cand.norm() > 1e-6) {
      v = cand.normalized();
      break;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (std::abs(v(k)) > 1e-12) {
      v *= std::conj(v(k)) / std::abs(v(k));
      v(k) = std::abs(v(k));
      break;
    }
  }
  return std::sqrt(lmax) * v;
}

RescaleResult rescale_to_feasible(const BeamformerSet& w, const Scenario& scenario, double delta_inc, double cap,
                                  double tol_feas) {
  if (!(delta_inc > 0.0)) throw InvalidArgument("delta_inc must be positive");
  RescaleResult r;
  r.beamformers = w;
  r.constraints = check_feasibility(w, scenario, tol_feas);
  while (!r.constraints.feasible) {
    if (r.factor * (1.0 + delta_inc) > cap) return r;
    r.factor *= 1.0 + delta_inc;
    r.beamformers = w;
    r.beamformers.scale(r.factor);
    r.constraints = check_feasibility(r.beamformers, scenario, tol_feas);
  }
  r.success = true;
  return r;
}

}  // namespace locbeam::optimizer
