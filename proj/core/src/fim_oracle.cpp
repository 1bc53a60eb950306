// SPDX-License-Identifier: Apache-2.0
#include "locbeam/fim_oracle.hpp"

#include <cmath>

#include "locbeam/error.hpp"
#include "locbeam/ofdm.hpp"

namespace locbeam::fim {

namespace {

std::vector<CVector> streams(const CMatrix& sigma) {
  std::vector<CVector> out;
  if (sigma.rows() == 0) return out;
  const CMatrix h = (sigma + sigma.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    const double lambda = es.eigenvalues()(r);
    if (lambda > 0.0) out.push_back(std::sqrt(lambda) * es.eigenvectors().col(r));
  }
  return out;
}

FullFim schur(const Matrix& full, double scale) {
  FullFim out;
  out.full = full;
  const Eigen::Index n = full.rows() - 2;
  out.a = full.topLeftCorner(2, 2);
  out.b = full.topRightCorner(2, n);
  out.c = full.bottomRightCorner(n, n);
  Mat2 e = out.a;
  if (n > 0) {
    Vector d = out.c.diagonal();
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(d(k) > 0.0)) throw OracleDegenerate("nuisance information block is singular");
    }
    const Vector inv_sqrt = d.cwiseSqrt().cwiseInverse();
    const Matrix scaled = inv_sqrt.asDiagonal() * out.c * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(scaled, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 1e-12 * es.eigenvalues()(n - 1))) {
      throw OracleDegenerate("nuisance information block is singular");
    }
    const Matrix bs = out.b * inv_sqrt.asDiagonal();
    e -= bs * scaled.ldlt().solve(bs.transpose());
  }
  out.efim.scale = scale;
  out.efim.normalized = (e + e.transpose()) / 2.0 / scale;
  return out;
}

}  // namespace

FullFim oracle_full_fim_flat(const CovarianceSet& cov, const channel::FlatChannelSet& channels,
                             const scene::Topology& topology, const scene::SystemParams& params, int ms,
                             FlatMode mode, double clock_prior) {
  if (cov.n_bs() != channels.n_bs || cov.n_ms() != channels.n_ms) throw DimensionMismatch("shape");
  const double c = params.speed;
  const double np = params.pilot_symbols;
  const double beta2 = params.bandwidth_hz * params.bandwidth_hz;
  const double n0 = params.noise_w;
  const int n_bs = channels.n_bs;

  // amplitudes alpha_{j,r} = zeta h^H w_r over every stream r of every covariance at BS j
  std::vector<std::vector<Complex>> alpha(n_bs);
  for (int j = 0; j < n_bs; ++j) {
    const CVector& h = channels.at(j, ms);
    const double z = channels.zeta_at(j, ms);
    for (int k = 0; k < channels.n_ms; ++k) {
      for (const CVector& w : streams(cov.at(j, k))) alpha[j].push_back(z * h.dot(w));
    }
  }

  const int offset = mode == FlatMode::kTdoa ? 3 : 2;
  int dim = offset;
  std::vector<int> start(n_bs);
  for (int j = 0; j < n_bs; ++j) {
    start[j] = dim;
    dim += 2 * static_cast<int>(alpha[j].size());
  }

  Matrix full = Matrix::Zero(dim, dim);
  for (int j = 0; j < n_bs; ++j) {
    double snr = 0.0;
    for (const Complex& a : alpha[j]) snr += std::norm(a) / n0;
    const int local = 1 + 2 * static_cast<int>(alpha[j].size());
    Matrix psi = Matrix::Zero(local, local);
    psi(0, 0) = 8.0 * kPi * kPi * np * beta2 * snr;
    for (int k = 1; k < local; ++k) psi(k, k) = 2.0 * np / n0;

    Matrix t = Matrix::Zero(dim, local);
    const Vec2 q = direction(topology.link(j, ms).angle);
    t(0, 0) = q(0) / c;
    t(1, 0) = q(1) / c;
    if (mode == FlatMode::kTdoa) t(2, 0) = 1.0;
    for (int k = 1; k < local; ++k) t(start[j] + k - 1, k) = 1.0;
    full += t * psi * t.transpose();
  }
  if (mode == FlatMode::kTdoa) full(2, 2) += clock_prior * 8.0 * kPi * kPi * np * beta2;
  return schur(full, params.flat_scale());
}

FullFim oracle_full_fim_ofdm(const CovarianceSet& cov, const channel::SelectiveChannelSet& channels,
                             const scene::Topology& topology, const scene::SystemParams& params, int ms) {
  params.validate(true);
  if (cov.n_bs() != channels.n_bs || cov.n_ms() != channels.n_ms) throw DimensionMismatch("shape");
  if (cov.n_blocks() != params.blocks) throw DimensionMismatch("covariance blocks differ from N_C");
  const double c = params.speed;
  const double ts = params.sampling_period_s;
  const double n0 = params.noise_w;
  const int n_bs = channels.n_bs;
  const int nc = params.blocks;
  const int paths = static_cast<int>(channels.at(0, ms).cols());

  struct Block {
    int j;
    int b;
    std::vector<CVector> alpha;
    int start;
  };
  std::vector<Block> blocks;
  int dim = 2;
  for (int j = 0; j < n_bs; ++j) {
    const CMatrix& h = channels.at(j, ms);
    const double z = channels.zeta_at(j, ms);
    for (int b = 0; b < nc; ++b) {
      Block blk{j, b, {}, dim};
      for (int k = 0; k < channels.n_ms; ++k) {
        for (const CVector& w : streams(cov.at(j, k, b))) blk.alpha.push_back(z * h.adjoint() * w);
      }
      dim += 2 * paths * static_cast<int>(blk.alpha.size());
      blocks.push_back(std::move(blk));
    }
  }

  Matrix full = Matrix::Zero(dim, dim);
  for (const Block& blk : blocks) {
    const CMatrix f = ofdm::block_dft(params.subcarriers, nc, blk.b + 1, paths);
    const Matrix kd = ofdm::subcarrier_index_diag(params.subcarriers, nc, blk.b + 1);
    const CMatrix fkf = f.adjoint() * kd * f;
    const CMatrix fk2f = f.adjoint() * kd * kd * f;
    const CMatrix ff = f.adjoint() * f;
    const int streams_n = static_cast<int>(blk.alpha.size());
    const int local = 1 + 2 * paths * streams_n;

    Matrix psi = Matrix::Zero(local, local);
    double j_tau = 0.0;
    for (const CVector& a : blk.alpha) j_tau += a.dot(fk2f * a).real();
    psi(0, 0) = 4.0 * kPi * kPi / (ts * ts) * j_tau;
    for (int r = 0; r < streams_n; ++r) {
      const CVector u = fkf * blk.alpha[r];
      const int o = 1 + 2 * paths * r;
      for (int l = 0; l < paths; ++l) {
        psi(o + l, 0) = 2.0 * kPi / ts * u(l).imag();
        psi(o + paths + l, 0) = -2.0 * kPi / ts * u(l).real();
      }
      psi.block(o, o, paths, paths) = ff.real();
      psi.block(o, o + paths, paths, paths) = -ff.imag();
      psi.block(o + paths, o, paths, paths) = ff.imag();
      psi.block(o + paths, o + paths, paths, paths) = ff.real();
    }
    psi.row(0).tail(local - 1) = psi.col(0).tail(local - 1).transpose();
    psi *= 2.0 / n0;

    Matrix t = Matrix::Zero(dim, local);
    const Vec2 q = direction(topology.link(blk.j, ms).angle);
    t(0, 0) = q(0) / c;
    t(1, 0) = q(1) / c;
    for (int k = 1; k < local; ++k) t(blk.start + k - 1, k) = 1.0;
    full += t * psi * t.transpose();
  }
  return schur(full, params.ofdm_scale());
}

}  // namespace locbeam::fim
