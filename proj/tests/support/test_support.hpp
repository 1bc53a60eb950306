// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "locbeam/covariance.hpp"
#include "locbeam/optimizer.hpp"
#include "locbeam/scene.hpp"

namespace locbeam::testing {

inline CMatrix random_psd(std::mt19937_64& rng, int side, double power, int rank = 0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (rank <= 0) rank = side;
  CMatrix g(side, rank);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < rank; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  }
  CMatrix s = g * g.adjoint();
  s *= power / s.trace().real();
  return (s + s.adjoint()) / 2.0;
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int side) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) g(r, c) = Complex(normal(rng), normal(rng));
  }
  return (g + g.adjoint()) / 2.0;
}

inline CVector random_cvector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(n);
  for (int k = 0; k < n; ++k) v(k) = Complex(normal(rng), normal(rng));
  return v;
}

inline CovarianceSet random_covariances(std::mt19937_64& rng, const std::vector<int>& antennas, int n_ms,
                                        int n_blocks = 1, double power = 1e-3) {
  CovarianceSet cov(antennas, n_ms, n_blocks);
  for (int j = 0; j < cov.n_bs(); ++j) {
    for (int i = 0; i < n_ms; ++i) {
      for (int b = 0; b < n_blocks; ++b) cov.at(j, i, b) = random_psd(rng, antennas[j], power);
    }
  }
  return cov;
}

inline scene::Topology corners_line(double offset, int antennas = 4, int n_ms = 2) {
  scene::PlacementOptions po;
  po.kind = scene::Placement::kLineScene;
  po.antennas = antennas;
  po.line_offset = offset;
  return scene::random_topology(1, 200.0, 4, n_ms, po);
}

inline scene::Topology uniform_topology(std::uint64_t seed, int n_bs, int n_ms, int antennas = 4) {
  scene::PlacementOptions po;
  po.kind = scene::Placement::kUniform;
  po.antennas = antennas;
  return scene::random_topology(seed, 200.0, n_bs, n_ms, po);
}

// Topology from explicit coordinates, every BS with the same antenna count.
inline scene::Topology explicit_topology(const std::vector<scene::Position>& bs,
                                         const std::vector<scene::Position>& ms, int antennas) {
  scene::Topology t;
  t.region_side = 200.0;
  t.bs = bs;
  t.ms = ms;
  t.bs_antennas.assign(bs.size(), antennas);
  return t;
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace locbeam::testing
