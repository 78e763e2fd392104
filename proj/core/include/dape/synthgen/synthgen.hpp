#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dape/signalio/manifest.hpp"

namespace dape::synthgen {

struct SynthSourceSpec {
  std::string name;
  int channels = 4;
  double sampling_rate = 128.0;
  double amplitude_scale = 1.0;
  double noise_std = 0.5;
  double dc_offset = 0.0;
  std::uint64_t mixing_seed = 1;
  int trials_per_class = 60;
  double trial_seconds = 13.0;
  signalio::LabelMode label_mode = signalio::LabelMode::kDiscrete3;
  // Leading segment reserved for baseline correction; the emitted manifest
  // sets tail_seconds = trial_seconds - baseline_seconds.
  double baseline_seconds = 3.0;

  void validate() const;
  std::size_t samples_per_trial() const;
};

// Per-class latent oscillation, indexed by signalio::Emotion.
struct SynthClassSpec {
  std::array<double, 3> frequency_hz = {6.0, 12.0, 24.0};
  std::array<double, 3> amplitude = {1.0, 1.0, 1.0};

  void validate() const;
};

// Unit-norm per-source mixing vector drawn from `mixing_seed`, with the
// sign fixed so the first entry is non-negative.
std::vector<double> mixing_vector(int channels, std::uint64_t mixing_seed);

// Valence/arousal anchor (1..9 rating scale) used for a given emotion.
signalio::ValenceArousal va_anchor(signalio::Emotion4 e);

// Each trial: class sinusoid (random phase) mixed into the channels,
// scaled by amplitude_scale, shifted by dc_offset, plus white Gaussian
// noise. Sample values are rounded to float32 so the manifest round trip is
// lossless. Output is a pure function of (specs, class_spec, seed).
std::vector<signalio::Dataset> generate(const std::vector<SynthSourceSpec>& sources, const SynthClassSpec& classes,
                                        std::uint64_t seed);

// Writes each generated dataset to <out>/<source name>/ and returns the
// directories in source order.
std::vector<std::filesystem::path> generate_to(const std::filesystem::path& out,
                                               const std::vector<SynthSourceSpec>& sources,
                                               const SynthClassSpec& classes, std::uint64_t seed);

// The three-source configuration used by the acceptance experiment.
std::vector<SynthSourceSpec> reference_sources();

}  // namespace dape::synthgen
