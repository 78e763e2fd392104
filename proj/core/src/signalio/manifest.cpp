#include "dape/signalio/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dape/error.hpp"
#include "dape/io.hpp"

namespace dape::signalio {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

RawLabel parse_label(const json& j, LabelMode mode, const std::string& where) {
  switch (mode) {
    case LabelMode::kDiscrete3:
      if (!j.is_string()) throw DataError(where + ": discrete3 label must be a string");
      return parse_emotion(j.get<std::string>());
    case LabelMode::kDiscrete4:
      if (!j.is_string()) throw DataError(where + ": discrete4 label must be a string");
      return parse_emotion4(j.get<std::string>());
    case LabelMode::kValenceArousal: {
      if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw DataError(where + ": valence_arousal label must be [valence, arousal]");
      }
      ValenceArousal va{j[0].get<double>(), j[1].get<double>()};
      if (!std::isfinite(va.valence) || !std::isfinite(va.arousal)) {
        throw DataError(where + ": non-finite valence/arousal label");
      }
      return va;
    }
  }
  throw DataError(where + ": unknown label mode");
}

json label_to_json(const RawLabel& label) {
  if (const auto* e = std::get_if<Emotion>(&label)) return std::string(to_string(*e));
  if (const auto* e = std::get_if<Emotion4>(&label)) return std::string(to_string(*e));
  const auto& va = std::get<ValenceArousal>(label);
  return json::array({va.valence, va.arousal});
}

bool label_matches_mode(const RawLabel& label, LabelMode mode) {
  switch (mode) {
    case LabelMode::kDiscrete3: return std::holds_alternative<Emotion>(label);
    case LabelMode::kDiscrete4: return std::holds_alternative<Emotion4>(label);
    case LabelMode::kValenceArousal: return std::holds_alternative<ValenceArousal>(label);
  }
  return false;
}

}  // namespace

Dataset load_dataset(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) throw DataError("missing manifest: " + manifest_path.string());
  const json m = io::read_json(manifest_path);
  const std::string where = manifest_path.string();

  Dataset ds;
  ds.spec.name = require<std::string>(m, "name", where);
  ds.spec.channels = require<int>(m, "channels", where);
  ds.spec.sampling_rate = require<double>(m, "sampling_rate_hz", where);
  ds.spec.label_mode = parse_label_mode(require<std::string>(m, "label_mode", where));
  if (!m.contains("recordings") || !m["recordings"].is_array()) {
    throw DataError(where + ": 'recordings' must be an array");
  }
  if (ds.spec.channels < 1) throw DataError(where + ": channels must be >= 1");
  if (!(ds.spec.sampling_rate > 0.0)) throw DataError(where + ": sampling_rate_hz must be > 0");

  for (const json& r : m["recordings"]) {
    Recording rec;
    rec.id = require<std::string>(r, "id", where);
    const std::string rwhere = where + " recording '" + rec.id + "'";
    const auto file = require<std::string>(r, "file", rwhere);
    rec.n_samples = require<std::size_t>(r, "n_samples", rwhere);
    if (!r.contains("label")) throw DataError(rwhere + ": missing field 'label'");
    rec.raw_label = parse_label(r["label"], ds.spec.label_mode, rwhere);
    rec.channels = ds.spec.channels;

    const fs::path data_path = dir / file;
    if (!fs::exists(data_path)) throw DataError(rwhere + ": missing data file " + data_path.string());
    const auto bytes = io::read_bytes(data_path);
    const std::size_t expected = static_cast<std::size_t>(rec.channels) * rec.n_samples;
    if (bytes.size() != expected * sizeof(float)) {
      throw DataError(rwhere + ": size mismatch, expected " + std::to_string(rec.channels) + "x" +
                      std::to_string(rec.n_samples) + " float32 values (" + std::to_string(expected * 4) +
                      " bytes), file has " + std::to_string(bytes.size()) + " bytes");
    }
    const auto values = io::decode_f32_le(bytes);
    rec.samples.assign(values.begin(), values.end());
    if (!std::all_of(rec.samples.begin(), rec.samples.end(), [](double v) { return std::isfinite(v); })) {
      throw DataError(rwhere + ": non-finite sample values");
    }
    ds.recordings.push_back(std::move(rec));
  }
  if (ds.recordings.empty()) throw DataError(where + ": no recordings");

  if (m.contains("tail_seconds")) {
    ds.spec.tail_seconds = require<double>(m, "tail_seconds", where);
  } else {
    // Default T: the length of the shortest recording.
    std::size_t shortest = std::numeric_limits<std::size_t>::max();
    for (const auto& r : ds.recordings) shortest = std::min(shortest, r.n_samples);
    ds.spec.tail_seconds = static_cast<double>(shortest) / ds.spec.sampling_rate;
  }
  ds.spec.validate();
  return ds;
}

void write_dataset(const fs::path& dir, const Dataset& dataset) {
  dataset.spec.validate();
  json recs = json::array();
  for (const auto& rec : dataset.recordings) {
    if (rec.channels != dataset.spec.channels ||
        rec.samples.size() != static_cast<std::size_t>(rec.channels) * rec.n_samples) {
      throw DataError("recording '" + rec.id + "' does not match the source channel count");
    }
    if (!label_matches_mode(rec.raw_label, dataset.spec.label_mode)) {
      throw DataError("recording '" + rec.id + "' label does not match label_mode");
    }
    std::vector<float> f(rec.samples.begin(), rec.samples.end());
    std::vector<std::uint8_t> bytes;
    io::append_f32_le(bytes, f);
    const std::string file = "data/" + rec.id + ".f32";
    io::atomic_write(dir / file, bytes);
    recs.push_back({{"id", rec.id}, {"file", file}, {"n_samples", rec.n_samples}, {"label", label_to_json(rec.raw_label)}});
  }
  json m = {
      {"name", dataset.spec.name},
      {"channels", dataset.spec.channels},
      {"sampling_rate_hz", dataset.spec.sampling_rate},
      {"label_mode", std::string(to_string(dataset.spec.label_mode))},
      {"tail_seconds", dataset.spec.tail_seconds},
      {"recordings", std::move(recs)},
  };
  io::atomic_write_json(dir / "manifest.json", m);
}

}  // namespace dape::signalio
