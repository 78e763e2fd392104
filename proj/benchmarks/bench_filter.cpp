#include <benchmark/benchmark.h>

#include <vector>

#include "dape/random.hpp"
#include "dape/signalio/butterworth.hpp"

namespace {

void BM_BandpassApply(benchmark::State& state) {
  const auto filt = dape::signalio::design_butterworth_bandpass(4.0, 40.0, 4, 128.0);
  dape::Rng rng(4);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(filt.apply(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BandpassApply)->Arg(1664)->Arg(1 << 16);

void BM_BandpassDesign(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dape::signalio::design_butterworth_bandpass(4.0, 40.0, 4, 200.0));
}
BENCHMARK(BM_BandpassDesign);

}  // namespace

BENCHMARK_MAIN();
