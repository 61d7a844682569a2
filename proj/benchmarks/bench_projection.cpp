#include <benchmark/benchmark.h>

#include "lcq/projection.hpp"
#include "lcq/quermass.hpp"

namespace {

using namespace lcq;

void BM_ProjectNumeric(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto i = static_cast<std::size_t>(state.range(1));
  const GridSpec amb = GridSpec::cube(3, 5.0, count);
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(3), amb);
  const Subspace xi = HaarSampler{1, 0}.sample(0, 3, i);
  const GridSpec target = subspace_grid(amb, xi.basis());
  const GridSpec fiber = subspace_grid(amb, xi.complement());
  for (auto _ : state) benchmark::DoNotOptimize(project_potential(u, xi, target, fiber));
}
BENCHMARK(BM_ProjectNumeric)->Args({33, 1})->Args({33, 2})->Args({65, 2})->Unit(benchmark::kMillisecond);

void BM_QuermassMonteCarlo(benchmark::State& state) {
  EngineConfig cfg;
  cfg.mode = SubspaceMode::mc;
  cfg.samples = static_cast<std::size_t>(state.range(0));
  cfg.seed = 7;
  cfg.count = 33;
  cfg.projection.analytic = false;
  const auto f = LogConcaveFunction::gaussian(3);
  for (auto _ : state) benchmark::DoNotOptimize(quermassintegral(f, 1, cfg));
}
BENCHMARK(BM_QuermassMonteCarlo)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MixedFd(benchmark::State& state) {
  EngineConfig cfg;
  cfg.count = static_cast<std::size_t>(state.range(0));
  const auto f = LogConcaveFunction::gaussian(2);
  for (auto _ : state) benchmark::DoNotOptimize(mixed_quermass_fd(f, f, 0, cfg));
}
BENCHMARK(BM_MixedFd)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

}  // namespace
