#include <benchmark/benchmark.h>

#include "lcq/legendre.hpp"
#include "lcq/parallel.hpp"

namespace {

using namespace lcq;

void BM_Conjugate1D(benchmark::State& state) {
  lcq::ScopedThreadCount serial(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(1), GridSpec::cube(1, 4.0, n));
  const GridSpec dual = GridSpec::cube(1, 3.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(conjugate(u, dual));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Conjugate1D)->RangeMultiplier(4)->Range(1 << 12, 1 << 22)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

void BM_ConjugateCube(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto count = static_cast<std::size_t>(state.range(1));
  const GridSpec g = GridSpec::cube(dim, 3.0, count);
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(dim), g);
  for (auto _ : state) benchmark::DoNotOptimize(conjugate(u, g, {.refine = state.range(2) != 0}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.size()));
}
BENCHMARK(BM_ConjugateCube)
    ->Args({2, 257, 0})
    ->Args({2, 257, 1})
    ->Args({3, 65, 0})
    ->Args({3, 129, 0})
    ->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const GridSpec g = GridSpec::cube(2, 3.0, count);
  const auto u = sample_to_grid(ConvexFunction::half_squared_norm(2), g);
  for (auto _ : state) benchmark::DoNotOptimize(conjugate_bruteforce(u, g));
}
BENCHMARK(BM_BruteForce)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_AsplundPath(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto u = ConvexFunction::half_squared_norm(2);
  const AsplundPath path(u, u, GridSpec::cube(2, 6.0, count));
  for (auto _ : state) benchmark::DoNotOptimize(path.at(0.04));
}
BENCHMARK(BM_AsplundPath)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

}  // namespace
