#include <benchmark/benchmark.h>

#include "dape/model/encoder.hpp"
#include "dape/random.hpp"

namespace {

dape::model::EncoderConfig make_config(bool reduced) {
  dape::model::EncoderConfig cfg;
  if (reduced) cfg.filters = {8, 8, 16, 32, 64};
  cfg.kernel_length = 5;
  return cfg;
}

// Args: channels, window length, 1 for the reduced filter stack.
void BM_EncoderTrainStep(benchmark::State& state) {
  const auto channels = static_cast<int>(state.range(0));
  const auto length = static_cast<int>(state.range(1));
  const int batch = 32;
  dape::Rng rng(3);
  dape::model::Encoder enc(make_config(state.range(2) != 0), channels, rng);
  dape::Mat x(channels, batch * length);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (auto _ : state) {
    dape::model::EncoderTrace trace;
    const dape::Mat z = enc.forward(x, batch, length, dape::model::Mode::kTrain, &trace);
    enc.zero_grad();
    enc.backward(trace, dape::Mat::Ones(z.rows(), z.cols()), nullptr);
    benchmark::DoNotOptimize(z.data());
  }
}
BENCHMARK(BM_EncoderTrainStep)
    ->Args({4, 256, 1})
    ->Args({8, 400, 1})
    ->Args({4, 256, 0})
    ->Args({8, 400, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
