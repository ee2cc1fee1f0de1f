// Microbenchmarks for the hot paths: the master-equation right-hand side,
// one RK4 trajectory step, full counting trajectories and a small ensemble.

#include <benchmark/benchmark.h>

#include "qduet/lindblad.hpp"
#include "qduet/trajectory.hpp"

namespace {

qduet::ModelParams fig3_params() { return {10.0, 10.0, 2.2, 0.2, 1.0, 0.0, 0.0, 0.0}; }

void BM_LiouvillianApply(benchmark::State& state) {
  const qduet::ModelParams p = fig3_params();
  const qduet::Operator h = qduet::build_hamiltonian(p);
  const auto channels = qduet::build_channels(p);
  const qduet::StateVector eg = qduet::basis_state(qduet::kEG);
  qduet::DensityMatrix rho = eg * eg.adjoint();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qduet::liouvillian_apply(h, channels, rho));
  }
}
BENCHMARK(BM_LiouvillianApply);

void BM_LindbladIntegrate(benchmark::State& state) {
  const qduet::ModelParams p = fig3_params();
  const qduet::StateVector eg = qduet::basis_state(qduet::kEG);
  const qduet::DensityMatrix rho0 = eg * eg.adjoint();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qduet::integrate(p, rho0, 1e-3, 1.0, 2.0));
  }
}
BENCHMARK(BM_LindbladIntegrate);

void BM_NoJumpStep(benchmark::State& state) {
  const qduet::ModelParams p = fig3_params();
  const qduet::JumpProcess process(qduet::build_effective_hamiltonian(p),
                                   qduet::build_channels(p), 1e-3);
  qduet::StateVector psi = qduet::basis_state(qduet::kEG);
  for (auto _ : state) {
    psi = process.rk4_step(psi, 1e-3);
    benchmark::DoNotOptimize(psi);
  }
}
BENCHMARK(BM_NoJumpStep);

void BM_CountingTrajectory(benchmark::State& state) {
  const qduet::ModelParams p = fig3_params();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qduet::run_counting_trajectory(p, qduet::basis_state(qduet::kEG), 8.0, 0.5, seed++));
  }
}
BENCHMARK(BM_CountingTrajectory);

void BM_Ensemble1k(benchmark::State& state) {
  const qduet::ModelParams p = fig3_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qduet::run_ensemble(p, qduet::basis_state(qduet::kEG), 1000,
                                                 4.0, 0.5, 42));
  }
}
BENCHMARK(BM_Ensemble1k);

} // namespace

BENCHMARK_MAIN();
