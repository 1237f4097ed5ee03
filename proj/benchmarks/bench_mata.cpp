#include <benchmark/benchmark.h>

#include "mata/distributions.hpp"
#include "mata/performance.hpp"
#include "mata/tail.hpp"
#include "mata/weights.hpp"

namespace {

mata::ProblemConfig config(int m, double rho, double d) {
  return mata::ProblemConfig{mata::DegreesOfFreedom(m), rho, 0.05, mata::WeightSpec::mic(d)};
}

void BM_StudentTCdf(benchmark::State& state) {
  const mata::StudentT t{mata::DegreesOfFreedom(static_cast<int>(state.range(0)))};
  double x = -6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.cdf(x));
    x = x > 6.0 ? -6.0 : x + 0.013;
  }
}
BENCHMARK(BM_StudentTCdf)->Arg(1)->Arg(10)->Arg(200);

void BM_StudentTQuantile(benchmark::State& state) {
  const mata::StudentT t{mata::DegreesOfFreedom(10)};
  double p = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.quantile(p));
    p = p > 0.99 ? 0.01 : p + 0.0007;
  }
}
BENCHMARK(BM_StudentTQuantile);

void BM_SolveTail(benchmark::State& state) {
  const mata::TailModel model(config(10, 0.8, 2.0));
  double gamma = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.solve(gamma));
    gamma = gamma > 10.0 ? 0.0 : gamma + 0.01;
  }
}
BENCHMARK(BM_SolveTail);

// Fresh model per iteration, so the tail memo starts empty.
void BM_CoverageColdCache(benchmark::State& state) {
  for (auto _ : state) {
    const mata::PerformanceModel model(config(static_cast<int>(state.range(0)), 0.8, 2.0));
    benchmark::DoNotOptimize(model.evaluate(2.0));
  }
}
BENCHMARK(BM_CoverageColdCache)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_CoverageWarmCache(benchmark::State& state) {
  const mata::PerformanceModel model(config(10, 0.8, 2.0));
  model.evaluate(2.0);
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(2.0));
}
BENCHMARK(BM_CoverageWarmCache)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
