#include <benchmark/benchmark.h>

#include "weyl1d/fixtures.hpp"
#include "weyl1d/measure.hpp"

namespace {

void BM_BallMeasure(benchmark::State& state, const char* name) {
  const auto fx = weyl1d::make_fixture(name);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weyl1d::ball_measure(fx.space, x, 0.05));
    x = x > 3.0 ? 0.1 : x + 0.01;
  }
}
BENCHMARK_CAPTURE(BM_BallMeasure, flat, "flat_pi");
BENCHMARK_CAPTURE(BM_BallMeasure, sinpow3, "sinpow_N3");
BENCHMARK_CAPTURE(BM_BallMeasure, sampled, "sampled_near_degenerate");

void BM_RatioIntegral(benchmark::State& state, const char* name) {
  const auto fx = weyl1d::make_fixture(name);
  const double r = 1e-3 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(weyl1d::ratio_integral(fx.space, r));
}
BENCHMARK_CAPTURE(BM_RatioIntegral, flat, "flat_pi")->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RatioIntegral, sinpow3, "sinpow_N3")->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
