#include <benchmark/benchmark.h>

#include "dape/mmd/mmd.hpp"
#include "dape/random.hpp"

namespace {

dape::Mat random_batch(int b, int d, dape::Rng& rng) {
  dape::Mat m(b, d);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

void BM_Mmd2(benchmark::State& state) {
  dape::Rng rng(1);
  const auto b = static_cast<int>(state.range(0));
  const auto zp = random_batch(b, 50, rng);
  const auto zq = random_batch(b, 50, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dape::mmd::mmd2_unbiased(zp, zq, 15.0));
}
BENCHMARK(BM_Mmd2)->Arg(32)->Arg(128);

void BM_AlignmentGrad(benchmark::State& state) {
  dape::Rng rng(2);
  std::vector<dape::Mat> z;
  for (int k = 0; k < 3; ++k) z.push_back(random_batch(32, 50, rng));
  const dape::mmd::Bandwidths bw;
  const auto pairs = dape::mmd::sample_pairs(3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(dape::mmd::alignment_loss_grad(z, bw, pairs));
}
BENCHMARK(BM_AlignmentGrad);

}  // namespace

BENCHMARK_MAIN();
