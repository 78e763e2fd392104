#include "dape/synthgen/synthgen.hpp"

#include <cmath>
#include <numbers>

#include "dape/error.hpp"
#include "dape/random.hpp"

namespace dape::synthgen {

using signalio::Emotion;
using signalio::Emotion4;

void SynthSourceSpec::validate() const {
  if (name.empty()) throw ConfigError("synth source needs a name");
  if (channels < 1) throw ConfigError("synth source '" + name + "': channels must be >= 1");
  if (!(sampling_rate > 0.0)) throw ConfigError("synth source '" + name + "': sampling_rate must be > 0");
  if (!(amplitude_scale > 0.0)) throw ConfigError("synth source '" + name + "': amplitude_scale must be > 0");
  if (!(noise_std >= 0.0)) throw ConfigError("synth source '" + name + "': noise_std must be >= 0");
  if (!std::isfinite(dc_offset)) throw ConfigError("synth source '" + name + "': dc_offset must be finite");
  if (trials_per_class < 1) throw ConfigError("synth source '" + name + "': trials_per_class must be >= 1");
  if (!(baseline_seconds >= 0.0)) throw ConfigError("synth source '" + name + "': baseline_seconds must be >= 0");
  if (!(trial_seconds >= 2.0 + baseline_seconds)) {
    throw ConfigError("synth source '" + name + "': trial_seconds must cover the baseline plus one 2 s window");
  }
}

std::size_t SynthSourceSpec::samples_per_trial() const {
  return static_cast<std::size_t>(std::llround(trial_seconds * sampling_rate));
}

void SynthClassSpec::validate() const {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(frequency_hz[i] > 4.0 && frequency_hz[i] < 40.0)) {
      throw ConfigError("class frequencies must lie inside (4, 40) Hz");
    }
    if (!(amplitude[i] > 0.0)) throw ConfigError("class amplitudes must be positive");
    for (std::size_t j = 0; j < i; ++j) {
      if (frequency_hz[i] == frequency_hz[j]) throw ConfigError("class frequencies must be pairwise distinct");
    }
  }
}

std::vector<double> mixing_vector(int channels, std::uint64_t mixing_seed) {
  Rng rng(derive_seed(mixing_seed, "mixing"));
  std::vector<double> w(static_cast<std::size_t>(channels));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : w) {
      v = rng.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double sign = w[0] < 0.0 ? -1.0 : 1.0;
  const double inv = sign / std::sqrt(norm2);
  for (double& v : w) v *= inv;
  return w;
}

signalio::ValenceArousal va_anchor(Emotion4 e) {
  switch (e) {
    case Emotion4::kFear: return {2.0, 8.0};
    case Emotion4::kSad: return {2.0, 2.0};
    case Emotion4::kNeutral: return {5.0, 5.0};
    case Emotion4::kHappy: return {8.0, 8.0};
  }
  return {5.0, 5.0};
}

namespace {

constexpr double kVaJitter = 0.4;

Emotion4 four_class_for(Emotion e, int trial) {
  switch (e) {
    case Emotion::kNegative: return trial % 2 == 0 ? Emotion4::kFear : Emotion4::kSad;
    case Emotion::kNeutral: return Emotion4::kNeutral;
    case Emotion::kPositive: return Emotion4::kHappy;
  }
  return Emotion4::kNeutral;
}

signalio::Recording make_trial(const SynthSourceSpec& spec, const SynthClassSpec& classes,
                               const std::vector<double>& mixing, Emotion e, int trial, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  signalio::Recording rec;
  rec.id = spec.name + "-" + std::string(signalio::to_string(e)) + "-" + std::to_string(trial);
  rec.channels = spec.channels;
  rec.n_samples = spec.samples_per_trial();
  rec.samples.resize(static_cast<std::size_t>(spec.channels) * rec.n_samples);

  const auto k = static_cast<std::size_t>(e);
  const double freq = classes.frequency_hz[k];
  const double amp = classes.amplitude[k] * spec.amplitude_scale;
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double step = 2.0 * std::numbers::pi * freq / spec.sampling_rate;

  for (int c = 0; c < spec.channels; ++c) {
    double* out = rec.channel(c);
    const double gain = amp * mixing[static_cast<std::size_t>(c)];
    for (std::size_t n = 0; n < rec.n_samples; ++n) {
      double v = gain * std::sin(step * static_cast<double>(n) + phase) + spec.dc_offset;
      if (spec.noise_std > 0.0) v += spec.noise_std * rng.normal();
      out[n] = static_cast<double>(static_cast<float>(v));
    }
  }

  switch (spec.label_mode) {
    case signalio::LabelMode::kDiscrete3: rec.raw_label = e; break;
    case signalio::LabelMode::kDiscrete4: rec.raw_label = four_class_for(e, trial); break;
    case signalio::LabelMode::kValenceArousal: {
      const auto anchor = va_anchor(four_class_for(e, trial));
      rec.raw_label = signalio::ValenceArousal{anchor.valence + kVaJitter * rng.normal(),
                                               anchor.arousal + kVaJitter * rng.normal()};
      break;
    }
  }
  return rec;
}

}  // namespace

std::vector<signalio::Dataset> generate(const std::vector<SynthSourceSpec>& sources, const SynthClassSpec& classes,
                                        std::uint64_t seed) {
  classes.validate();
  std::vector<signalio::Dataset> out;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const auto& spec = sources[s];
    spec.validate();
    signalio::Dataset ds;
    ds.spec.name = spec.name;
    ds.spec.channels = spec.channels;
    ds.spec.sampling_rate = spec.sampling_rate;
    ds.spec.label_mode = spec.label_mode;
    ds.spec.tail_seconds = spec.trial_seconds - spec.baseline_seconds;
    const auto mixing = mixing_vector(spec.channels, spec.mixing_seed);
    const std::uint64_t source_seed = derive_seed(seed, "source", s);
    for (int k = 0; k < signalio::kNumEmotions; ++k) {
      for (int t = 0; t < spec.trials_per_class; ++t) {
        const auto trial_index = static_cast<std::uint64_t>(k * spec.trials_per_class + t);
        ds.recordings.push_back(make_trial(spec, classes, mixing, static_cast<Emotion>(k), t,
                                           derive_seed(source_seed, "trial", trial_index)));
      }
    }
    out.push_back(std::move(ds));
  }
  return out;
}

std::vector<std::filesystem::path> generate_to(const std::filesystem::path& out,
                                               const std::vector<SynthSourceSpec>& sources,
                                               const SynthClassSpec& classes, std::uint64_t seed) {
  std::vector<std::filesystem::path> dirs;
  const auto datasets = generate(sources, classes, seed);
  for (const auto& ds : datasets) {
    const auto dir = out / ds.spec.name;
    signalio::write_dataset(dir, ds);
    dirs.push_back(dir);
  }
  return dirs;
}

std::vector<SynthSourceSpec> reference_sources() {
  using signalio::LabelMode;
  std::vector<SynthSourceSpec> s(3);
  s[0].name = "src1";
  s[0].channels = 4;
  s[0].sampling_rate = 128.0;
  s[0].amplitude_scale = 1.0;
  s[0].dc_offset = 0.0;
  s[0].mixing_seed = 101;
  s[0].label_mode = LabelMode::kValenceArousal;

  s[1].name = "src2";
  s[1].channels = 8;
  s[1].sampling_rate = 200.0;
  s[1].amplitude_scale = 3.0;
  s[1].dc_offset = 1.0;
  s[1].mixing_seed = 202;
  s[1].label_mode = LabelMode::kDiscrete3;

  s[2].name = "src3";
  s[2].channels = 6;
  s[2].sampling_rate = 128.0;
  s[2].amplitude_scale = 0.5;
  s[2].dc_offset = -0.5;
  s[2].mixing_seed = 303;
  s[2].label_mode = LabelMode::kDiscrete4;

  for (auto& src : s) {
    src.noise_std = 0.5;
    src.trials_per_class = 60;
    src.trial_seconds = 13.0;
  }
  return s;
}

}  // namespace dape::synthgen
