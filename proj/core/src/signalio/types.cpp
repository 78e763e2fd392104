#include "dape/signalio/types.hpp"

#include <cmath>

#include "dape/error.hpp"

namespace dape::signalio {

std::string_view to_string(LabelMode m) {
  switch (m) {
    case LabelMode::kDiscrete3: return "discrete3";
    case LabelMode::kDiscrete4: return "discrete4";
    case LabelMode::kValenceArousal: return "valence_arousal";
  }
  return "?";
}

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::kNegative: return "negative";
    case Emotion::kNeutral: return "neutral";
    case Emotion::kPositive: return "positive";
  }
  return "?";
}

std::string_view to_string(Emotion4 e) {
  switch (e) {
    case Emotion4::kFear: return "fear";
    case Emotion4::kSad: return "sad";
    case Emotion4::kNeutral: return "neutral";
    case Emotion4::kHappy: return "happy";
  }
  return "?";
}

LabelMode parse_label_mode(std::string_view s) {
  if (s == "discrete3") return LabelMode::kDiscrete3;
  if (s == "discrete4") return LabelMode::kDiscrete4;
  if (s == "valence_arousal") return LabelMode::kValenceArousal;
  throw DataError("unknown label_mode '" + std::string(s) + "'");
}

Emotion parse_emotion(std::string_view s) {
  if (s == "negative") return Emotion::kNegative;
  if (s == "neutral") return Emotion::kNeutral;
  if (s == "positive") return Emotion::kPositive;
  throw DataError("unknown 3-class label '" + std::string(s) + "'");
}

Emotion4 parse_emotion4(std::string_view s) {
  if (s == "fear") return Emotion4::kFear;
  if (s == "sad") return Emotion4::kSad;
  if (s == "neutral") return Emotion4::kNeutral;
  if (s == "happy") return Emotion4::kHappy;
  throw DataError("unknown 4-class label '" + std::string(s) + "'");
}

void DataSourceSpec::validate() const {
  if (channels < 1) throw DataError("source '" + name + "': channels must be >= 1");
  if (!(sampling_rate > 0.0) || !std::isfinite(sampling_rate)) {
    throw DataError("source '" + name + "': sampling_rate must be > 0");
  }
  if (!(tail_seconds > 0.0)) throw DataError("source '" + name + "': tail_seconds must be > 0");
}

std::size_t DataSourceSpec::samples_for(double seconds) const {
  // Rates and durations are usually integral; rounding absorbs representation error.
  return static_cast<std::size_t>(std::llround(seconds * sampling_rate));
}

}  // namespace dape::signalio
