#include <benchmark/benchmark.h>

#include "orlicz/young.hpp"

namespace {

void BM_young_eval(benchmark::State& state) {
  const auto psi = orlicz::YoungFunction::power_log(2, 1.5);
  double t = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi(t));
    t = t < 1e6 ? t * 1.0001 : 1.0;
  }
}
BENCHMARK(BM_young_eval);

void BM_conjugate(benchmark::State& state) {
  const auto psi = orlicz::YoungFunction::power_log(2, 1.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(orlicz::conjugate(psi));
  }
}
BENCHMARK(BM_conjugate);

}  // namespace

BENCHMARK_MAIN();
