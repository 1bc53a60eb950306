// SPDX-License-Identifier: Apache-2.0
#include "locbeam/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "locbeam/error.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/fim_oracle.hpp"
#include "locbeam/gains.hpp"
#include "locbeam/optimizer.hpp"
#include "locbeam/rate.hpp"

namespace locbeam::validate {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

CMatrix random_psd(std::mt19937_64& rng, int side, double power) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> rank_dist(1, side);
  const int rank = rank_dist(rng);
  CMatrix g(side, rank);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < rank; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  }
  CMatrix s = g * g.adjoint();
  s *= power / s.trace().real();
  return (s + s.adjoint()) / 2.0;
}

CovarianceSet random_covariances(std::mt19937_64& rng, const std::vector<int>& antennas, int n_ms, int n_blocks) {
  std::uniform_real_distribution<double> power(1e-4, 1e-2);
  CovarianceSet cov(antennas, n_ms, n_blocks);
  for (int j = 0; j < cov.n_bs(); ++j) {
    for (int i = 0; i < n_ms; ++i) {
      for (int b = 0; b < n_blocks; ++b) cov.at(j, i, b) = random_psd(rng, antennas[j], power(rng));
    }
  }
  return cov;
}

struct FlatInstance {
  scene::Topology topology;
  scene::SystemParams params;
  channel::FlatChannelSet channels;
  CovarianceSet cov;
};

template <typename T>
T pick(std::mt19937_64& rng, std::initializer_list<T> values) {
  std::uniform_int_distribution<std::size_t> d(0, values.size() - 1);
  return *(values.begin() + d(rng));
}

FlatInstance random_flat(std::mt19937_64& rng) {
  FlatInstance f;
  const int n_bs = pick(rng, {3, 4});
  const int n_ms = pick(rng, {1, 2});
  scene::PlacementOptions po;
  po.kind = scene::Placement::kUniform;
  po.antennas = pick(rng, {1, 2, 4});
  f.topology = scene::random_topology(rng(), 200.0, n_bs, n_ms, po);
  f.params = scene::default_params();
  f.channels = channel::flat_channels(f.topology, f.params);
  f.cov = random_covariances(rng, f.topology.bs_antennas, n_ms, 1);
  return f;
}

double relative_error(const Mat2& a, const Mat2& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

double scaled_min_eig(const Mat2& diff, const Mat2& reference) {
  Eigen::SelfAdjointEigenSolver<Mat2> es((diff + diff.transpose()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) / std::max(1.0, reference.norm());
}

Check open_check(std::string name, double tolerance) {
  Check c;
  c.name = std::move(name);
  c.passed = true;
  c.tolerance = tolerance;
  return c;
}

Check finish(Check c, Clock::time_point start) {
  c.runtime_s = seconds_since(start);
  c.passed = c.passed && c.max_error <= c.tolerance;
  std::ostringstream os;
  os << c.instances << " instances, max error " << c.max_error << " (tol " << c.tolerance << ")";
  if (!c.detail.empty()) os << "; " << c.detail;
  c.detail = os.str();
  return c;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Suite suite_from_string(const std::string& s) {
  if (s == "oracles") return Suite::kOracles;
  if (s == "properties") return Suite::kProperties;
  if (s == "all") return Suite::kAll;
  throw InvalidArgument("unknown validation suite '" + s + "'");
}

Check check_toa_oracle(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("flat TOA EFIM vs full-FIM Schur complement", 1e-8);
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      const Mat2 closed = fim::efim_toa_flat(f.cov, f.channels, f.topology, f.params, i).matrix();
      const Mat2 oracle =
          fim::oracle_full_fim_flat(f.cov, f.channels, f.topology, f.params, i, fim::FlatMode::kToa).efim.matrix();
      c.max_error = std::max(c.max_error, relative_error(closed, oracle));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_tdoa_oracle(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("flat TDOA EFIM vs full FIM with clock prior", 1e-8);
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    const double kb = pick(rng, {0.0, 1.0, 1e3});
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      const Mat2 closed = fim::efim_tdoa_flat(f.cov, f.channels, f.topology, f.params, i, kb).matrix();
      const Mat2 oracle = fim::oracle_full_fim_flat(f.cov, f.channels, f.topology, f.params, i,
                                                    fim::FlatMode::kTdoa, kb)
                              .efim.matrix();
      c.max_error = std::max(c.max_error, relative_error(closed, oracle));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_tdoa_forms(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("TDOA EFIM pairwise form vs difference form", 1e-9);
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    const double kb = pick(rng, {0.0, 1.0, 1e3});
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      const Mat2 a = fim::efim_tdoa_flat(f.cov, f.channels, f.topology, f.params, i, kb).normalized;
      const Mat2 b = fim::efim_tdoa_flat_difference(f.cov, f.channels, f.topology, f.params, i, kb).normalized;
      c.max_error = std::max(c.max_error, relative_error(a, b));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_ofdm_oracle(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("OFDM EFIM vs full-FIM construction", 1e-8);
  while (c.instances < instances) {
    const int n = pick(rng, {8, 16});
    const int nc = pick(rng, {1, 2});
    const int l = pick(rng, {1, 2, 3});
    if (n / nc <= l) continue;
    scene::PlacementOptions po;
    po.kind = scene::Placement::kUniform;
    po.antennas = pick(rng, {1, 2, 4});
    const auto topo = scene::random_topology(rng(), 200.0, pick(rng, {3, 4}), pick(rng, {1, 2}), po);
    scene::SystemParams params = scene::default_params();
    params.subcarriers = n;
    params.blocks = nc;
    params.paths = {l};
    channel::SelectiveOptions so;
    so.seed = rng();
    const auto ch = channel::selective_channels(topo, params, so);
    const CovarianceSet cov = random_covariances(rng, topo.bs_antennas, topo.n_ms(), nc);
    for (int i = 0; i < topo.n_ms(); ++i) {
      const Mat2 closed = fim::efim_toa_ofdm(cov, ch, topo, params, i).matrix();
      const Mat2 oracle = fim::oracle_full_fim_ofdm(cov, ch, topo, params, i).efim.matrix();
      c.max_error = std::max(c.max_error, relative_error(closed, oracle));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_ofdm_singular(std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("OFDM EFIM singular when block size equals path count", 1e-8);
  struct Grid {
    int n, nc, l;
  };
  for (const Grid g : {Grid{8, 4, 2}, Grid{16, 8, 2}, Grid{12, 4, 3}, Grid{32, 8, 4}}) {
    scene::PlacementOptions po;
    po.kind = scene::Placement::kUniform;
    const auto topo = scene::random_topology(rng(), 200.0, 4, 1, po);
    scene::SystemParams params = scene::default_params();
    params.subcarriers = g.n;
    params.blocks = g.nc;
    params.paths = {g.l};
    channel::SelectiveOptions so;
    so.seed = rng();
    const auto ch = channel::selective_channels(topo, params, so);
    const CovarianceSet cov = random_covariances(rng, topo.bs_antennas, topo.n_ms(), g.nc);
    // Reference size: the same covariances seen through the full, non-nuisance delay information.
    scene::SystemParams wide = params;
    wide.blocks = 1;
    CovarianceSet merged(topo.bs_antennas, topo.n_ms(), 1);
    for (int j = 0; j < topo.n_bs(); ++j) {
      for (int i = 0; i < topo.n_ms(); ++i) {
        for (int b = 0; b < g.nc; ++b) merged.at(j, i) += cov.at(j, i, b);
      }
    }
    for (int i = 0; i < topo.n_ms(); ++i) {
      const double ref = fim::efim_toa_ofdm(merged, ch, topo, wide, i).matrix().norm();
      const fim::Efim closed = fim::efim_toa_ofdm(cov, ch, topo, params, i);
      const fim::Efim oracle = fim::oracle_full_fim_ofdm(cov, ch, topo, params, i).efim;
      c.max_error = std::max({c.max_error, closed.matrix().norm() / ref, oracle.matrix().norm() / ref});
      if (!fim::crb(closed).singular) c.passed = false;
    }
    ++c.instances;
  }
  c.detail = "EFIM norms relative to the N_C = 1 EFIM of the merged covariances";
  return finish(c, start);
}

Check check_toa_tdoa_ordering(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("J_TOA - J_TDOA is PSD", 1e-9);
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    const double kb = pick(rng, {0.0, 1.0, 1e3, 1e6});
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      const Mat2 toa = fim::efim_toa_flat(f.cov, f.channels, f.topology, f.params, i).normalized;
      const Mat2 tdoa = fim::efim_tdoa_flat(f.cov, f.channels, f.topology, f.params, i, kb).normalized;
      c.max_error = std::max(c.max_error, -scaled_min_eig(toa - tdoa, toa));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_tdoa_bound_ordering(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("J_TDOA - TDOA lower bound is PSD", 1e-9);
  int violations = 0;
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    std::uniform_real_distribution<double> exponent(0.0, 12.0);
    const double kb = std::pow(10.0, exponent(rng));
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      const Mat2 tdoa = fim::efim_tdoa_flat(f.cov, f.channels, f.topology, f.params, i, kb).normalized;
      const Mat2 bound = fim::efim_tdoa_lower_bound(f.cov, f.channels, f.topology, f.params, i, kb).normalized;
      const double e = -scaled_min_eig(tdoa - bound, tdoa);
      if (e > c.tolerance) ++violations;
      c.max_error = std::max(c.max_error, e);
    }
    ++c.instances;
  }
  c.detail = std::to_string(violations) + " violating MS evaluations";
  return finish(c, start);
}

Check check_robust_dominance(int configurations, int samples, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> width(0.0, kPi / 6.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Check c = open_check("J_phi - Q_phi dominance over the angle uncertainty set", 1e-9);
  for (int k = 0; k < configurations; ++k) {
    const double a1 = angle(rng), a2 = angle(rng);
    const double e1 = width(rng), e2 = width(rng);
    const Mat2 q1 = fim::q_phi_toa(a1, e1);
    const Mat2 q12 = fim::q_phi_tdoa(a1, a2, e1, e2);
    for (int s = 0; s < samples; ++s) {
      // include the set boundary on the first samples
      const double u1 = s == 0 ? 1.0 : s == 1 ? -1.0 : unit(rng);
      const double u2 = s == 0 ? -1.0 : s == 1 ? 1.0 : unit(rng);
      const double p1 = a1 + u1 * e1, p2 = a2 + u2 * e2;
      c.max_error = std::max(c.max_error, -scaled_min_eig(fim::j_phi(p1) - q1, Mat2::Identity()));
      c.max_error = std::max(c.max_error, -scaled_min_eig(fim::j_phi_pair(p1, p2) - q12, Mat2::Identity()));
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_robust_crb(int configurations, int samples, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> width(0.0, 0.15);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> snr_dist(0.1, 10.0);
  Check c = open_check("robust CRB surrogate upper-bounds the true CRB", 1e-9);
  int positive_definite = 0;
  for (int k = 0; k < configurations; ++k) {
    const int n = pick(rng, {3, 4});
    std::vector<double> nominal(n), halfwidth(n), snr(n);
    std::vector<Mat2> q(n);
    for (int j = 0; j < n; ++j) {
      nominal[j] = angle(rng);
      halfwidth[j] = width(rng);
      snr[j] = snr_dist(rng);
      q[j] = fim::q_phi_toa(nominal[j], halfwidth[j]);
    }
    const double kb = pick(rng, {0.0, 1.0, 100.0});
    const Mat2 q_toa = fim::toa_combination(snr, q);
    const Mat2 q_tdoa = fim::tdoa_combination(
        snr, q, [&](int j, int l) { return fim::q_phi_tdoa(nominal[j], nominal[l], halfwidth[j], halfwidth[l]); },
        kb);
    const auto crb_q_toa = fim::crb(q_toa);
    const auto crb_q_tdoa = fim::crb(q_tdoa);
    for (int s = 0; s < samples; ++s) {
      std::vector<double> actual(n);
      std::vector<Mat2> d(n);
      for (int j = 0; j < n; ++j) {
        actual[j] = nominal[j] + unit(rng) * halfwidth[j];
        d[j] = fim::j_phi(actual[j]);
      }
      const Mat2 j_toa = fim::toa_combination(snr, d);
      const Mat2 j_tdoa = fim::tdoa_combination(
          snr, d, [&](int a, int b) { return fim::j_phi_pair(actual[a], actual[b]); }, kb);
      if (!crb_q_toa.singular) {
        const double excess = fim::crb(j_toa).value - crb_q_toa.value;
        c.max_error = std::max(c.max_error, excess / crb_q_toa.value);
        ++positive_definite;
      }
      if (!crb_q_tdoa.singular) {
        const double excess = fim::crb(j_tdoa).value - crb_q_tdoa.value;
        c.max_error = std::max(c.max_error, excess / crb_q_tdoa.value);
        ++positive_definite;
      }
    }
    ++c.instances;
  }
  c.detail = std::to_string(positive_definite) + " comparisons with a positive definite surrogate";
  if (positive_definite == 0) c.passed = false;
  return finish(c, start);
}

Check check_tangent_majorization(int instances, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("interference log term below its tangent, tight at the expansion point", 1e-10);
  for (int k = 0; k < instances; ++k) {
    const FlatInstance f = random_flat(rng);
    const CovarianceSet next = random_covariances(rng, f.topology.bs_antennas, f.topology.n_ms(), 1);
    const GainTable gains = flat_gains(f.channels);
    const double noise = f.params.noise_w;
    for (int i = 0; i < f.topology.n_ms(); ++i) {
      for (int m = 0; m < f.topology.n_bs(); ++m) {
        const double exact_next = std::log2(noise + gains.interference(next, m, i, 0));
        const double exact_here = std::log2(noise + gains.interference(f.cov, m, i, 0));
        const double tangent_next = rate::dc_tangent_flat(next, f.cov, f.channels, i, m, noise);
        const double tangent_here = rate::dc_tangent_flat(f.cov, f.cov, f.channels, i, m, noise);
        const double scale = std::max(1.0, std::abs(exact_here));
        c.max_error = std::max(c.max_error, (exact_next - tangent_next) / scale);
        c.max_error = std::max(c.max_error, std::abs(exact_here - tangent_here) / scale);
      }
    }
    ++c.instances;
  }
  return finish(c, start);
}

Check check_mm_monotonic(int scenarios, std::uint64_t seed) {
  const auto start = Clock::now();
  std::mt19937_64 rng(seed);
  Check c = open_check("MM objective non-increasing and iterates truly feasible", 1e-7);
  int iterates = 0;
  for (int k = 0; k < scenarios; ++k) {
    scene::PlacementOptions po;
    po.kind = scene::Placement::kCorners;
    const auto topo = scene::random_topology(rng(), 200.0, 4, 2, po);
    const auto sc = optimizer::flat_scenario(optimizer::Mode::kToaFlat, topo, scene::default_params(),
                                             scene::Requirements::broadcast(2, 1.2, 400.0));
    optimizer::Options opt;
    opt.record_iterates = true;
    const auto report = optimizer::solve_toa_flat(sc, opt);
    if (report.status != optimizer::Status::kFeasible) {
      c.passed = false;
      c.detail += "scenario " + std::to_string(k) + " not feasible; ";
      continue;
    }
    const auto& trace = report.objective_trace;
    for (std::size_t n = 1; n < trace.size(); ++n) {
      c.max_error = std::max(c.max_error, (trace[n] - trace[n - 1]) / trace[n - 1]);
    }
    for (const CovarianceSet& it : report.iterates) {
      const auto r = optimizer::check_feasibility(it, sc, opt.tol_feas);
      if (!r.feasible) {
        c.passed = false;
        c.detail += "infeasible iterate (worst slack " + std::to_string(r.worst_slack) + "); ";
      }
      ++iterates;
    }
    ++c.instances;
  }
  c.detail += std::to_string(iterates) + " iterates checked";
  return finish(c, start);
}

Report run(Suite suite) {
  Report r;
  if (suite == Suite::kOracles || suite == Suite::kAll) {
    r.checks.push_back(check_toa_oracle());
    r.checks.push_back(check_tdoa_oracle());
    r.checks.push_back(check_tdoa_forms());
    r.checks.push_back(check_ofdm_oracle());
    r.checks.push_back(check_ofdm_singular());
  }
  if (suite == Suite::kProperties || suite == Suite::kAll) {
    r.checks.push_back(check_toa_tdoa_ordering());
    r.checks.push_back(check_tdoa_bound_ordering());
    r.checks.push_back(check_robust_dominance());
    r.checks.push_back(check_robust_crb());
    r.checks.push_back(check_tangent_majorization());
    r.checks.push_back(check_mm_monotonic());
  }
  return r;
}

}  // namespace locbeam::validate
