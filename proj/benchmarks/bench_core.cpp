#include <benchmark/benchmark.h>

#include <cstdint>

#include "heatsing/heatsing.hpp"

namespace hs = heatsing;

namespace {

void BM_GaussianBallMass(benchmark::State& state) {
  double acc = 0.0;
  for (auto _ : state) {
    acc += hs::gaussian_ball_mass(0.3, 0.2, 0.05, 3);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_GaussianBallMass);

// Singular mass at one radius on a sampled fBm path; argument is log2 of the grid length.
void BM_SingularMassFbm(benchmark::State& state) {
  const std::size_t n = std::size_t{1} << state.range(0);
  const hs::FgnSampler sampler{hs::HurstExponent(0.4), n};
  const auto eta = hs::rebase(hs::SingularTrajectory::sampled(hs::generate_fbm_path(sampler, 7, 3, 1.0 / n)));
  hs::QuadratureConfig quad;
  quad.rel_tol = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(hs::singular_mass(eta, 0.05, {3, 1.0}, quad).value);
}
BENCHMARK(BM_SingularMassFbm)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_SingularMassHolder(benchmark::State& state) {
  const auto eta = hs::rebase(hs::SingularTrajectory::holder({0, 0, 0}, 1.0, 0.4, {1, 0, 0}, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(hs::singular_mass(eta, 0.01, {3, 1.0}, {}).value);
}
BENCHMARK(BM_SingularMassHolder)->Unit(benchmark::kMillisecond);

// One 3-component fBm path; argument is log2 of the grid length.
void BM_FbmPath(benchmark::State& state) {
  const std::size_t n = std::size_t{1} << state.range(0);
  const hs::FgnSampler sampler{hs::HurstExponent(0.3), n};
  std::uint64_t replica = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hs::generate_fbm_path(sampler, 1, 3, 1.0 / n, replica++));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * 3));
}
BENCHMARK(BM_FbmPath)->Arg(12)->Arg(16)->Arg(18)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
