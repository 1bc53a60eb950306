// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "locbeam/channel.hpp"
#include "locbeam/conic.hpp"
#include "locbeam/conic_builder.hpp"
#include "locbeam/fim.hpp"
#include "locbeam/optimizer.hpp"

using namespace locbeam;

namespace {

scene::Topology corners(int n_ms, int antennas) {
  scene::PlacementOptions po;
  po.kind = scene::Placement::kCorners;
  po.antennas = antennas;
  return scene::random_topology(7, 200.0, 4, n_ms, po);
}

CovarianceSet random_cov(const scene::Topology& t, int n_ms, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CovarianceSet cov(t.bs_antennas, n_ms);
  for (int j = 0; j < t.n_bs(); ++j) {
    for (int i = 0; i < n_ms; ++i) {
      const int m = t.bs_antennas[j];
      CMatrix a(m, m);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) a(r, c) = Complex(normal(rng), normal(rng));
      }
      cov.at(j, i, 0) = 1e-3 * a * a.adjoint();
    }
  }
  return cov;
}

void BM_EfimToaFlat(benchmark::State& state) {
  const int n_ms = static_cast<int>(state.range(0));
  const auto t = corners(n_ms, 4);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto cov = random_cov(t, n_ms, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fim::efim_toa_flat(cov, ch, t, p, 0));
}
BENCHMARK(BM_EfimToaFlat)->Arg(1)->Arg(4)->Arg(16);

void BM_EfimTdoaFlat(benchmark::State& state) {
  const auto t = corners(4, 4);
  const auto p = scene::default_params();
  const auto ch = channel::flat_channels(t, p);
  const auto cov = random_cov(t, 4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(fim::efim_tdoa_flat(cov, ch, t, p, 0, 1.0));
}
BENCHMARK(BM_EfimTdoaFlat);

// min tr M subject to [[M, I], [I, s D]] >= 0, s >= 0, s <= bound, repeated n times.
void BM_SchurConic(benchmark::State& state) {
  const int blocks = static_cast<int>(state.range(0));
  conic::ProblemBuilder b;
  const int s = b.add_variables(1);
  b.add_objective(s, 1.0);
  for (int k = 0; k < blocks; ++k) {
    conic::SymAffine2 j;
    j.add(conic::LinExpr::variable(s), Mat2{{1.0 + k, 0.0}, {0.0, 1.0 / (1.0 + k)}});
    conic::build_schur_crb_block(b, j, 2.0 + k);
  }
  const conic::ConicProblem problem = b.build();
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(problem));
}
BENCHMARK(BM_SchurConic)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SolveToaFlat(benchmark::State& state) {
  const auto t = corners(2, 4);
  const auto sc = optimizer::flat_scenario(optimizer::Mode::kToaFlat, t, scene::default_params(),
                                           scene::Requirements::broadcast(2, 1.2, 400.0));
  for (auto _ : state) benchmark::DoNotOptimize(optimizer::solve(sc));
}
BENCHMARK(BM_SolveToaFlat)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
