#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dape/signalio/epoch_store.hpp"
#include "dape/signalio/manifest.hpp"

namespace dape::signalio {

struct PreprocessConfig {
  double baseline_seconds = 3.0;
  double band_low_hz = 4.0;
  double band_high_hz = 40.0;
  int filter_order = 4;
  double window_seconds = 2.0;
  SplitRatios ratios;
};

// Fixed order per recording: baseline_correct -> bandpass_filter ->
// truncate_tail -> segment_windows.
std::vector<Window> preprocess_recording(const Recording& rec, const DataSourceSpec& spec, Emotion label,
                                         int source_id, const PreprocessConfig& cfg);

// Full pipeline over several sources: label harmonisation, per-recording
// preprocessing, cross-source undersampling and the stratified split.
// Source ids follow the order of `datasets`.
EpochStore prepare_store(const std::vector<Dataset>& datasets, const PreprocessConfig& cfg, std::uint64_t seed);

}  // namespace dape::signalio
