#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "dape/signalio/manifest.hpp"
#include "dape/synthgen/synthgen.hpp"
#include "test_support.hpp"

namespace {

using namespace dape::synthgen;
using dape::signalio::Emotion;
using dape::signalio::LabelMode;

std::vector<SynthSourceSpec> small_sources() {
  auto s = reference_sources();
  for (auto& x : s) x.trials_per_class = 4;
  return s;
}

TEST(Synthgen, ReferenceSourcesMatchDocumentedConfig) {
  const auto s = reference_sources();
  ASSERT_EQ(s.size(), 3u);
  const int ch[] = {4, 8, 6};
  const double fs[] = {128, 200, 128}, amp[] = {1, 3, 0.5}, dc[] = {0, 1, -0.5};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s[i].channels, ch[i]);
    EXPECT_DOUBLE_EQ(s[i].sampling_rate, fs[i]);
    EXPECT_DOUBLE_EQ(s[i].amplitude_scale, amp[i]);
    EXPECT_DOUBLE_EQ(s[i].dc_offset, dc[i]);
    EXPECT_DOUBLE_EQ(s[i].noise_std, 0.5);
    EXPECT_EQ(s[i].trials_per_class, 60);
    EXPECT_DOUBLE_EQ(s[i].trial_seconds, 13.0);
  }
  EXPECT_EQ(s[0].label_mode, LabelMode::kValenceArousal);
  EXPECT_EQ(s[1].label_mode, LabelMode::kDiscrete3);
  EXPECT_EQ(s[2].label_mode, LabelMode::kDiscrete4);
}

TEST(Synthgen, DeterministicGivenSeed) {
  const auto a = dape::synthgen::generate(small_sources(), {}, 9);
  const auto b = dape::synthgen::generate(small_sources(), {}, 9);
  const auto c = dape::synthgen::generate(small_sources(), {}, 10);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t s = 0; s < 3; ++s) {
    ASSERT_EQ(a[s].recordings.size(), 12u);
    EXPECT_EQ(a[s].recordings[5].samples, b[s].recordings[5].samples);
    EXPECT_NE(a[s].recordings[5].samples, c[s].recordings[5].samples);
  }
}

TEST(Synthgen, MixingVectorIsUnitNorm) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto v = mixing_vector(6, seed);
    double n = 0.0;
    for (double x : v) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-12);
    EXPECT_GE(v[0], 0.0);
  }
}

TEST(Synthgen, ClassFrequencyDominatesSpectrum) {
  SynthClassSpec classes;
  const auto data = dape::synthgen::generate(small_sources(), classes, 4);
  const auto& src = data[1];  // 200 Hz, discrete3 labels
  for (const auto& rec : src.recordings) {
    const auto e = std::get<Emotion>(rec.raw_label);
    const double target = classes.frequency_hz[static_cast<std::size_t>(e)];
    // DFT power of channel 0 over the whole trial.
    auto power = [&](double f) {
      std::complex<double> acc = 0.0;
      for (std::size_t n = 0; n < rec.n_samples; ++n)
        acc += rec.at(0, n) * std::polar(1.0, -2.0 * M_PI * f * static_cast<double>(n) / 200.0);
      return std::norm(acc);
    };
    const double p_target = power(target);
    for (double f : classes.frequency_hz)
      if (f != target) EXPECT_GT(p_target, 20.0 * power(f)) << rec.id;
  }
}

TEST(Synthgen, WrittenManifestLoadsBack) {
  const auto dir = dape::testing::scratch_dir("synth_write");
  const auto dirs = generate_to(dir, small_sources(), {}, 2);
  ASSERT_EQ(dirs.size(), 3u);
  const auto in_memory = dape::synthgen::generate(small_sources(), {}, 2);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto ds = dape::signalio::load_dataset(dirs[s]);
    EXPECT_EQ(ds.spec.label_mode, in_memory[s].spec.label_mode);
    EXPECT_DOUBLE_EQ(ds.spec.tail_seconds, 10.0);
    EXPECT_EQ(ds.recordings[3].samples, in_memory[s].recordings[3].samples);
  }
}

}  // namespace
