#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dape::signalio {

enum class LabelMode { kDiscrete3, kDiscrete4, kValenceArousal };

// Common three-class label space.
enum class Emotion : std::uint8_t { kNegative = 0, kNeutral = 1, kPositive = 2 };
inline constexpr int kNumEmotions = 3;

// Four-class label space produced by clustering or given directly by
// four-emotion datasets.
enum class Emotion4 : std::uint8_t { kFear = 0, kSad = 1, kNeutral = 2, kHappy = 3 };

std::string_view to_string(LabelMode m);
std::string_view to_string(Emotion e);
std::string_view to_string(Emotion4 e);
LabelMode parse_label_mode(std::string_view s);
Emotion parse_emotion(std::string_view s);
Emotion4 parse_emotion4(std::string_view s);

struct ValenceArousal {
  double valence = 0.0;
  double arousal = 0.0;
  bool operator==(const ValenceArousal&) const = default;
};

using RawLabel = std::variant<Emotion, Emotion4, ValenceArousal>;

struct DataSourceSpec {
  std::string name;
  int channels = 0;
  double sampling_rate = 0.0;  // Hz
  LabelMode label_mode = LabelMode::kDiscrete3;
  double tail_seconds = 0.0;   // T; the final T seconds of each recording are kept

  void validate() const;
  // Number of samples spanned by `seconds` at this source's rate.
  std::size_t samples_for(double seconds) const;
};

// One trial: channel-major C x N samples plus its raw label.
struct Recording {
  std::string id;
  int channels = 0;
  std::size_t n_samples = 0;
  std::vector<double> samples;  // size channels * n_samples, channel-major
  RawLabel raw_label = Emotion::kNeutral;

  double at(int c, std::size_t n) const { return samples[static_cast<std::size_t>(c) * n_samples + n]; }
  double& at(int c, std::size_t n) { return samples[static_cast<std::size_t>(c) * n_samples + n]; }
  const double* channel(int c) const { return samples.data() + static_cast<std::size_t>(c) * n_samples; }
  double* channel(int c) { return samples.data() + static_cast<std::size_t>(c) * n_samples; }
};

// A fixed-length training sample cut from one recording.
struct Window {
  std::vector<float> x;  // channels * length, channel-major
  int channels = 0;
  std::size_t length = 0;
  Emotion y = Emotion::kNeutral;
  int source_id = 0;      // 0-based index into the store's sources
  std::string recording_id;
};

}  // namespace dape::signalio
