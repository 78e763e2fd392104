#include "dape/signalio/pipeline.hpp"

#include "dape/error.hpp"
#include "dape/random.hpp"
#include "dape/signalio/labels.hpp"
#include "dape/signalio/preprocess.hpp"

namespace dape::signalio {

std::vector<Window> preprocess_recording(const Recording& rec, const DataSourceSpec& spec, Emotion label,
                                         int source_id, const PreprocessConfig& cfg) {
  const double fs = spec.sampling_rate;
  Recording r = baseline_correct(rec, fs, cfg.baseline_seconds);
  r = bandpass_filter(r, fs, cfg.band_low_hz, cfg.band_high_hz, cfg.filter_order);
  r = truncate_tail(r, fs, spec.tail_seconds);
  return segment_windows(r, fs, label, source_id, cfg.window_seconds);
}

EpochStore prepare_store(const std::vector<Dataset>& datasets, const PreprocessConfig& cfg, std::uint64_t seed) {
  if (datasets.empty()) throw DataError("prepare: no datasets given");
  std::vector<SourceInfo> sources;
  std::vector<Window> windows;
  for (std::size_t s = 0; s < datasets.size(); ++s) {
    const Dataset& ds = datasets[s];
    ds.spec.validate();
    SourceInfo info;
    info.name = ds.spec.name;
    info.channels = ds.spec.channels;
    info.sampling_rate = ds.spec.sampling_rate;
    info.window_samples = ds.spec.samples_for(cfg.window_seconds);
    info.label_mode = ds.spec.label_mode;
    sources.push_back(info);

    const auto labels = harmonize_recordings(ds.recordings, ds.spec.label_mode, derive_seed(seed, "kmeans", s));
    for (std::size_t r = 0; r < ds.recordings.size(); ++r) {
      auto w = preprocess_recording(ds.recordings[r], ds.spec, labels[r], static_cast<int>(s), cfg);
      std::move(w.begin(), w.end(), std::back_inserter(windows));
    }
  }
  const auto balanced = undersample(windows, static_cast<int>(sources.size()), derive_seed(seed, "undersample"));
  EpochStore store = split(std::move(sources), balanced, derive_seed(seed, "split"), cfg.ratios);
  store.validate();
  return store;
}

}  // namespace dape::signalio
