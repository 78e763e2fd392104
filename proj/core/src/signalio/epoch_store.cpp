#include "dape/signalio/epoch_store.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dape/error.hpp"
#include "dape/io.hpp"
#include "dape/random.hpp"
#include "dape/version.hpp"

namespace dape::signalio {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(s) + "'");
}

EpochStore::EpochStore(std::vector<SourceInfo> sources, std::vector<Window> windows, std::vector<Split> splits)
    : sources_(std::move(sources)), windows_(std::move(windows)), splits_(std::move(splits)) {
  if (windows_.size() != splits_.size()) throw DataError("epoch store: windows/splits size mismatch");
  compute_hash();
}

std::vector<std::size_t> EpochStore::indices(int source, Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    if (windows_[i].source_id == source && splits_[i] == split) out.push_back(i);
  }
  return out;
}

ClassCounts EpochStore::class_counts(int source, Split split) const {
  ClassCounts counts{};
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    if (windows_[i].source_id == source && splits_[i] == split) ++counts[static_cast<std::size_t>(windows_[i].y)];
  }
  return counts;
}

void EpochStore::validate() const {
  if (sources_.empty()) throw DataError("epoch store has no sources");
  for (const auto& w : windows_) {
    if (w.source_id < 0 || w.source_id >= num_sources()) throw DataError("window with invalid source id");
    const auto& src = sources_[static_cast<std::size_t>(w.source_id)];
    if (w.channels != src.channels || w.length != src.window_samples ||
        w.x.size() != static_cast<std::size_t>(w.channels) * w.length) {
      throw DataError("window shape does not match source '" + src.name + "'");
    }
  }
  for (int s = 0; s < num_sources(); ++s) {
    for (const Split sp : {Split::kTrain, Split::kVal, Split::kTest}) {
      const ClassCounts c = class_counts(s, sp);
      for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0) {
          throw DataError("empty cell: source '" + sources_[static_cast<std::size_t>(s)].name + "', class " +
                          std::string(to_string(static_cast<Emotion>(k))) + ", split " + std::string(to_string(sp)));
        }
      }
      if (sp == Split::kTrain && !(c[0] == c[1] && c[1] == c[2])) {
        throw DataError("train split of source '" + sources_[static_cast<std::size_t>(s)].name +
                        "' is not class-balanced");
      }
    }
  }
}

std::vector<std::uint8_t> EpochStore::serialise_windows() const {
  std::vector<std::uint8_t> bytes;
  std::size_t total = 0;
  for (const auto& w : windows_) total += w.x.size();
  bytes.reserve(total * sizeof(float));
  for (const auto& w : windows_) io::append_f32_le(bytes, w.x);
  return bytes;
}

std::string EpochStore::serialise_index_body() const {
  json srcs = json::array();
  for (const auto& s : sources_) {
    srcs.push_back({{"name", s.name},
                    {"channels", s.channels},
                    {"sampling_rate_hz", s.sampling_rate},
                    {"window_samples", s.window_samples},
                    {"label_mode", std::string(to_string(s.label_mode))}});
  }
  json wins = json::array();
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    wins.push_back({{"source", windows_[i].source_id},
                    {"class", std::string(to_string(windows_[i].y))},
                    {"split", std::string(to_string(splits_[i]))},
                    {"recording", windows_[i].recording_id}});
  }
  json body = {{"schema_version", kSchemaVersion}, {"sources", std::move(srcs)}, {"windows", std::move(wins)}};
  return body.dump();
}

void EpochStore::compute_hash() {
  auto bytes = serialise_windows();
  const std::string index = serialise_index_body();
  bytes.insert(bytes.end(), index.begin(), index.end());
  hash_ = io::sha256_hex(bytes);
}

void EpochStore::save(const fs::path& dir) const {
  fs::create_directories(dir);
  io::atomic_write(dir / "windows.f32", serialise_windows());
  json index = json::parse(serialise_index_body());
  index["store_hash"] = hash_;
  io::atomic_write_json(dir / "index.json", index);
}

EpochStore EpochStore::load(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  if (!fs::exists(index_path)) throw DataError("missing " + index_path.string());
  const json index = io::read_json(index_path);
  std::vector<SourceInfo> sources;
  try {
    for (const auto& s : index.at("sources")) {
      SourceInfo info;
      info.name = s.at("name").get<std::string>();
      info.channels = s.at("channels").get<int>();
      info.sampling_rate = s.at("sampling_rate_hz").get<double>();
      info.window_samples = s.at("window_samples").get<std::size_t>();
      info.label_mode = parse_label_mode(s.at("label_mode").get<std::string>());
      sources.push_back(std::move(info));
    }
  } catch (const json::exception& e) {
    throw DataError(index_path.string() + ": " + e.what());
  }
  const auto bytes = io::read_bytes(dir / "windows.f32");
  const auto values = io::decode_f32_le(bytes);
  std::vector<Window> windows;
  std::vector<Split> splits;
  std::size_t offset = 0;
  try {
    for (const auto& w : index.at("windows")) {
      Window win;
      win.source_id = w.at("source").get<int>();
      if (win.source_id < 0 || win.source_id >= static_cast<int>(sources.size())) {
        throw DataError(index_path.string() + ": window references unknown source");
      }
      const auto& src = sources[static_cast<std::size_t>(win.source_id)];
      win.channels = src.channels;
      win.length = src.window_samples;
      win.y = parse_emotion(w.at("class").get<std::string>());
      win.recording_id = w.value("recording", "");
      const std::size_t n = static_cast<std::size_t>(win.channels) * win.length;
      if (offset + n > values.size()) throw DataError("windows.f32 is shorter than index.json implies");
      win.x.assign(values.begin() + static_cast<std::ptrdiff_t>(offset),
                   values.begin() + static_cast<std::ptrdiff_t>(offset + n));
      offset += n;
      splits.push_back(parse_split(w.at("split").get<std::string>()));
      windows.push_back(std::move(win));
    }
  } catch (const json::exception& e) {
    throw DataError(index_path.string() + ": " + e.what());
  }
  if (offset != values.size()) throw DataError("windows.f32 is longer than index.json implies");
  EpochStore store(std::move(sources), std::move(windows), std::move(splits));
  if (index.contains("store_hash") && index["store_hash"].get<std::string>() != store.hash()) {
    throw DataError(dir.string() + ": store hash mismatch (files modified?)");
  }
  return store;
}

std::vector<Window> undersample(const std::vector<Window>& windows, int num_sources, std::uint64_t seed) {
  std::vector<std::vector<std::vector<std::size_t>>> cells(
      static_cast<std::size_t>(num_sources), std::vector<std::vector<std::size_t>>(kNumEmotions));
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const int s = windows[i].source_id;
    if (s < 0 || s >= num_sources) throw DataError("undersample: window with invalid source id");
    cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(windows[i].y)].push_back(i);
  }
  std::size_t target = std::numeric_limits<std::size_t>::max();
  for (int s = 0; s < num_sources; ++s) {
    for (int k = 0; k < kNumEmotions; ++k) {
      const auto& cell = cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
      if (cell.empty()) {
        throw DataError("undersample: class " + std::string(to_string(static_cast<Emotion>(k))) +
                        " is absent in source " + std::to_string(s));
      }
      target = std::min(target, cell.size());
    }
  }
  std::vector<std::size_t> keep;
  for (int s = 0; s < num_sources; ++s) {
    for (int k = 0; k < kNumEmotions; ++k) {
      const auto& cell = cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
      Rng rng(derive_seed(seed, "undersample", static_cast<std::uint64_t>(s * kNumEmotions + k)));
      for (const std::size_t j : sample_without_replacement(cell.size(), target, rng)) keep.push_back(cell[j]);
    }
  }
  std::sort(keep.begin(), keep.end());
  std::vector<Window> out;
  out.reserve(keep.size());
  for (const std::size_t i : keep) out.push_back(windows[i]);
  return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, SplitRatios ratios) {
  const double r[3] = {ratios.train, ratios.val, ratios.test};
  const double total = r[0] + r[1] + r[2];
  if (!(r[0] > 0 && r[1] > 0 && r[2] > 0) || std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be positive and sum to 1");
  }
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * r[i];
    // Guard against 0.6*5 = 2.9999999999999996.
    const double fl = std::floor(exact + 1e-9);
    sizes[i] = static_cast<std::size_t>(fl);
    frac[i] = exact - fl;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];
  return sizes;
}

EpochStore split(std::vector<SourceInfo> sources, const std::vector<Window>& windows, std::uint64_t seed,
                 SplitRatios ratios) {
  const int m = static_cast<int>(sources.size());
  std::vector<Split> assignment(windows.size(), Split::kTrain);
  for (int s = 0; s < m; ++s) {
    for (int k = 0; k < kNumEmotions; ++k) {
      std::vector<std::size_t> cell;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].source_id == s && static_cast<int>(windows[i].y) == k) cell.push_back(i);
      }
      const auto sizes = split_sizes(cell.size(), ratios);
      for (std::size_t j = 0; j < 3; ++j) {
        if (sizes[j] == 0) {
          throw DataError("split: empty (source " + std::to_string(s) + ", class " +
                          std::string(to_string(static_cast<Emotion>(k))) + ", " +
                          std::string(to_string(static_cast<Split>(j))) + ") cell");
        }
      }
      Rng rng(derive_seed(seed, "split", static_cast<std::uint64_t>(s * kNumEmotions + k)));
      rng.shuffle(cell);
      for (std::size_t j = 0; j < cell.size(); ++j) {
        assignment[cell[j]] = j < sizes[0] ? Split::kTrain : (j < sizes[0] + sizes[1] ? Split::kVal : Split::kTest);
      }
    }
  }
  // Storage order: source, split, then input order.
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (windows[a].source_id != windows[b].source_id) return windows[a].source_id < windows[b].source_id;
    return assignment[a] < assignment[b];
  });
  std::vector<Window> out_w;
  std::vector<Split> out_s;
  out_w.reserve(windows.size());
  for (const std::size_t i : order) {
    out_w.push_back(windows[i]);
    out_s.push_back(assignment[i]);
  }
  return EpochStore(std::move(sources), std::move(out_w), std::move(out_s));
}

}  // namespace dape::signalio
