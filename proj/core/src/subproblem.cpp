// SPDX-License-Identifier: Apache-2.0
#include "subproblem.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "locbeam/error.hpp"
#include "locbeam/rate.hpp"

namespace locbeam::optimizer::detail {

using conic::HermitianVar;
using conic::LinExpr;
using conic::ProblemBuilder;
using conic::SymAffine2;

namespace {

LinExpr product(const LinExpr& a, const LinExpr& b) {
  if (a.is_constant()) return a.constant * b;
  if (b.is_constant()) return b.constant * a;
  throw InvalidArgument("product of two non-constant expressions");
}

double tdoa_denominator(const LocalizationSpec& loc, const CovarianceSet& at) {
  double d = loc.clock_prior;
  for (int j = 0; j < loc.gains->n_bs; ++j) {
    for (int s = 0; s < loc.gains->n_slots; ++s) d += loc.gains->total_gain(at, j, loc.ms, s);
  }
  return d;
}

template <typename Snr>
Mat2 combine(const LocalizationSpec& loc, int n_bs, Snr snr, double denominator) {
  Mat2 n = Mat2::Zero();
  if (!loc.tdoa) {
    for (int j = 0; j < n_bs; ++j) n += snr(j) * loc.direction[j];
  } else {
    for (int j = 0; j < n_bs; ++j) n += loc.clock_prior * snr(j) * loc.direction[j];
    for (int j = 0; j < n_bs; ++j) {
      for (int l = j + 1; l < n_bs; ++l) n += snr(j) * snr(l) * loc.pair[j * n_bs + l];
    }
    n /= denominator;
  }
  return n - loc.subtract;
}

// With BS a active, N(s) = N0 + delta E with delta = s_a - s_a0, and 1/d >= (1 - r)/d0 with r = delta/d0. The
// product J0 + r (E - J0) - r^2 E is matrix-concave in r; r^2 is relaxed to w >= r^2 and w <= 1 keeps 1 - r >= 0.
SymAffine2 tdoa_minorant(ProblemBuilder& builder, const LocalizationSpec& loc, const std::vector<bool>& active,
                         const CovarianceSet& exp, const std::vector<LinExpr>& snr, double d0) {
  const int n_bs = loc.gains->n_bs;
  int a = -1;
  for (int j = 0; j < n_bs; ++j) {
    if (!active[j]) continue;
    if (a >= 0) throw InvalidArgument("TDOA minorant needs exactly one active BS");
    a = j;
  }
  if (a < 0) throw InvalidArgument("TDOA minorant needs exactly one active BS");
  std::vector<double> s0(n_bs, 0.0);
  for (int j = 0; j < n_bs; ++j) {
    for (int s = 0; s < loc.gains->n_slots; ++s) s0[j] += loc.gains->total_gain(exp, j, loc.ms, s);
  }
  auto pair = [&](int j, int l) -> const Mat2& { return j < l ? loc.pair[j * n_bs + l] : loc.pair[l * n_bs + j]; };
  Mat2 n0 = Mat2::Zero();
  for (int j = 0; j < n_bs; ++j) {
    n0 += loc.clock_prior * s0[j] * loc.direction[j];
    for (int l = j + 1; l < n_bs; ++l) n0 += s0[j] * s0[l] * pair(j, l);
  }
  Mat2 e = loc.clock_prior * loc.direction[a];
  for (int l = 0; l < n_bs; ++l) {
    if (l != a) e += s0[l] * pair(a, l);
  }
  const LinExpr r = (1.0 / d0) * (snr[a] - LinExpr(s0[a]));
  const int w = builder.add_variables(1);
  builder.add_psd_matrix({{LinExpr::variable(w), r}, {r, LinExpr(1.0)}});
  builder.add_nonneg(LinExpr(1.0) - LinExpr::variable(w));
  const Mat2 j0 = n0 / d0;
  SymAffine2 g;
  g.add_constant(j0);
  g.add(r, e - j0);
  g.add(LinExpr::variable(w), -e);
  return g;
}

}  // namespace

Mat2 localization_matrix(const LocalizationSpec& loc, const CovarianceSet& cov, const CovarianceSet& denominator_at) {
  const int n_bs = loc.gains->n_bs;
  std::vector<double> snr(n_bs, 0.0);
  for (int j = 0; j < n_bs; ++j) {
    for (int s = 0; s < loc.gains->n_slots; ++s) snr[j] += loc.gains->total_gain(cov, j, loc.ms, s);
  }
  const double d = loc.tdoa ? tdoa_denominator(loc, denominator_at) : 1.0;
  return combine(loc, n_bs, [&](int j) { return snr[j]; }, d);
}

namespace {

// First-order solvers return cone members only up to their tolerance.
CMatrix clamp_psd(const CMatrix& s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s);
  if (es.eigenvalues().minCoeff() >= 0.0) return s;
  const CMatrix v = es.eigenvectors();
  return v * es.eigenvalues().cwiseMax(0.0).asDiagonal() * v.adjoint();
}

}  // namespace

CovarianceSet Subproblem::extract(const Vector& x, const CovarianceSet& base) const {
  CovarianceSet out = base;
  std::size_t idx = 0;
  for (int j = 0; j < out.n_bs(); ++j) {
    for (int k = 0; k < n_ms; ++k) {
      for (int b = 0; b < n_blocks; ++b, ++idx) {
        if (sigma[idx].side > 0) out.at(j, k, b) = clamp_psd(sigma[idx].value(x));
      }
    }
  }
  return out;
}

Subproblem build_subproblem(const SubproblemSpec& spec) {
  const int n_bs = static_cast<int>(spec.antennas.size());
  const CovarianceSet& exp = *spec.expansion;
  ProblemBuilder builder;
  Subproblem sub;
  sub.n_ms = spec.n_ms;
  sub.n_blocks = spec.n_blocks;

  auto index = [&](int j, int k, int b) { return (j * spec.n_ms + k) * spec.n_blocks + b; };
  for (int j = 0; j < n_bs; ++j) {
    for (int k = 0; k < spec.n_ms; ++k) {
      for (int b = 0; b < spec.n_blocks; ++b) {
        if (spec.active[j]) {
          const HermitianVar v = conic::add_hermitian(builder, spec.antennas[j]);
          conic::add_hermitian_psd(builder, v);
          for (const auto& [i, c] : v.trace().terms) builder.add_objective(i, spec.objective_weight * c);
          sub.sigma.push_back(v);
        } else {
          sub.sigma.push_back(HermitianVar{});
        }
      }
    }
  }
  auto gain = [&](const GainTable& g, int j, int i, int k, int s) -> LinExpr {
    const int b = g.slot_block.at(s);
    const HermitianVar& v = sub.sigma[index(j, k, b)];
    if (v.side == 0) return LinExpr(g.gain(exp, j, i, k, s));
    return v.trace_with(g.at(j, i, s));
  };

  if (spec.rate_gains) {
    const GainTable& g = *spec.rate_gains;
    for (int i = 0; i < spec.n_ms; ++i) {
      if (!(spec.rate_req.at(i) > 0.0)) continue;
      LinExpr slack(-spec.rate_req[i]);
      for (int j = 0; j < n_bs; ++j) {
        for (int s = 0; s < g.n_slots; ++s) {
          if (!spec.active[j]) {
            const double total = g.total_gain(exp, j, i, s);
            const double interference = g.interference(exp, j, i, s);
            slack.constant += spec.rate_prefactor * (std::log2(1.0 + total) - std::log2(1.0 + interference));
            continue;
          }
          const int t = builder.add_variables(1);
          LinExpr z(1.0);
          for (int k = 0; k < spec.n_ms; ++k) z += gain(g, j, i, k, s);
          builder.add_exp(LinExpr::variable(t), LinExpr(1.0), z);
          slack.add(t, spec.rate_prefactor / kLn2);
          const rate::AffineForm tangent = rate::dc_tangent(exp, g, i, j, s, 1.0);
          LinExpr tan(tangent.constant);
          for (const auto& term : tangent.terms) {
            tan += sub.sigma[index(term.bs, term.ms, term.block)].trace_with(term.gradient);
          }
          slack -= spec.rate_prefactor * tan;
        }
      }
      builder.add_nonneg(slack);
    }
  }

  for (const LocalizationSpec& loc : spec.loc) {
    if (!std::isfinite(loc.bound)) continue;
    const GainTable& g = *loc.gains;
    std::vector<LinExpr> snr(n_bs);
    for (int j = 0; j < n_bs; ++j) {
      for (int s = 0; s < g.n_slots; ++s) {
        for (int k = 0; k < spec.n_ms; ++k) snr[j] += gain(g, j, loc.ms, k, s);
      }
    }
    const double denominator = loc.tdoa ? tdoa_denominator(loc, exp) : 1.0;
    SymAffine2 n;
    if (!loc.tdoa) {
      for (int j = 0; j < n_bs; ++j) n.add(snr[j], loc.direction[j]);
    } else {
      for (int j = 0; j < n_bs; ++j) n.add((loc.clock_prior / denominator) * snr[j], loc.direction[j]);
      for (int j = 0; j < n_bs; ++j) {
        for (int l = j + 1; l < n_bs; ++l) n.add((1.0 / denominator) * product(snr[j], snr[l]), loc.pair[j * n_bs + l]);
      }
    }
    if (loc.tdoa && loc.minorant) n = tdoa_minorant(builder, loc, spec.active, exp, snr, denominator);
    n.add_constant(-loc.subtract);
    // scale so that the trace bound becomes 2
    const double alpha = loc.bound / 2.0;
    n.xx *= alpha;
    n.xy *= alpha;
    n.yy *= alpha;
    conic::build_schur_crb_block(builder, n, 2.0);
  }
  sub.problem = builder.build();
  return sub;
}

}  // namespace locbeam::optimizer::detail
