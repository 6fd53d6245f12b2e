#include <benchmark/benchmark.h>

#include "weyl1d/fixtures.hpp"
#include "weyl1d/spectral.hpp"

namespace {

void BM_AssembleFlat(benchmark::State& state) {
  const auto fx = weyl1d::make_fixture("flat_pi");
  const auto disc = weyl1d::make_discretization(fx.space, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto as = weyl1d::assemble(fx.space, disc);
    benchmark::DoNotOptimize(as.stiffness.nonZeros());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleFlat)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void BM_EigenSolve(benchmark::State& state, const char* name) {
  const auto fx = weyl1d::make_fixture(name);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto disc = weyl1d::make_discretization(fx.space, n);
  for (auto _ : state) {
    auto spec = weyl1d::eigen_solve(fx.space, disc, n / 4 + 64);
    benchmark::DoNotOptimize(spec.resolved_count());
  }
}
BENCHMARK_CAPTURE(BM_EigenSolve, flat, "flat_pi")->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EigenSolve, circle, "circle_r1")->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_EigenSolve, sinpow3, "sinpow_N3")->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_HeatTrace(benchmark::State& state) {
  std::vector<double> ev;
  for (int k = 0; k < 2000; ++k) ev.push_back(static_cast<double>(k) * k);
  const auto spec = weyl1d::Spectrum::synthetic(ev, 3.141592653589793, ev.back());
  for (auto _ : state) benchmark::DoNotOptimize(weyl1d::heat_trace(spec, 1e-3, true));
}
BENCHMARK(BM_HeatTrace);

}  // namespace
BENCHMARK_MAIN();
