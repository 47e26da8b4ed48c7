// Serial reference kernels against their OpenMP versions.
#include "psys/semigroup.hpp"
#include "psys/solver.hpp"
#include "psys/special.hpp"
#include "psys/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace psys;

namespace {

StateVector state(std::size_t n) {
  const Grid g(n, 2500.0);
  return gaussian_initial(g, 0.05, 0.3);
}

template <bool Parallel>
void BM_derivative(benchmark::State& s) {
  const auto z = state(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(Parallel ? derivative(z.first, 2) : serial::derivative(z.first, 2));
}

template <bool Parallel>
void BM_translate(benchmark::State& s) {
  const auto z = state(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(Parallel ? translate(z.first, 17.3) : serial::translate(z.first, 17.3));
}

template <bool Parallel>
void BM_apply_eLt(benchmark::State& s) {
  const auto z = state(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(Parallel ? apply_eLt(z, 3.0) : serial::apply_eLt(z, 3.0));
}

template <bool Parallel>
void BM_sample_fn(benchmark::State& s) {
  std::vector<double> z;
  for (int i = 0; i < s.range(0); ++i) z.push_back(-30.0 + 60.0 * i / s.range(0));
  for (auto _ : s) benchmark::DoNotOptimize(Parallel ? sample_fn(1, z) : serial::sample_fn(1, z));
}

}  // namespace

BENCHMARK(BM_derivative<false>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_derivative<true>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_translate<false>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_translate<true>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_apply_eLt<false>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_apply_eLt<true>)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_sample_fn<false>)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sample_fn<true>)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
