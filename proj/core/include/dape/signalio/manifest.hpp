#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "dape/signalio/types.hpp"

namespace dape::signalio {

// A dataset directory holds manifest.json and data/<id>.f32 files.
//
// manifest.json:
//   { "name", "channels", "sampling_rate_hz",
//     "label_mode": "discrete3" | "discrete4" | "valence_arousal",
//     "tail_seconds" (optional; defaults to the shortest recording length),
//     "recordings": [ { "id", "file", "n_samples", "label" } ] }
//
// Discrete labels are strings ("negative", "fear", ...); valence/arousal
// labels are two-element arrays [valence, arousal]. Sample files are
// little-endian float32, channel-major.
struct Dataset {
  DataSourceSpec spec;
  std::vector<Recording> recordings;
};

Dataset load_dataset(const std::filesystem::path& dir);

// Writes the directory layout read by load_dataset. Sample values are
// stored as float32; `tail_seconds` is written when positive.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

}  // namespace dape::signalio
