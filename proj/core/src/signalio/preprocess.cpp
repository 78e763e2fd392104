#include "dape/signalio/preprocess.hpp"

#include <cmath>
#include <string>

#include "dape/error.hpp"
#include "dape/signalio/butterworth.hpp"

namespace dape::signalio {

namespace {

std::size_t seconds_to_samples(double seconds, double fs) {
  return static_cast<std::size_t>(std::llround(seconds * fs));
}

void check_shape(const Recording& rec) {
  if (rec.samples.size() != static_cast<std::size_t>(rec.channels) * rec.n_samples) {
    throw DataError("recording '" + rec.id + "': sample buffer does not match channels x n_samples");
  }
}

}  // namespace

Recording baseline_correct(const Recording& rec, double sampling_rate, double baseline_seconds) {
  check_shape(rec);
  const std::size_t nb = seconds_to_samples(baseline_seconds, sampling_rate);
  if (nb == 0) throw ConfigError("baseline window must contain at least one sample");
  if (rec.n_samples < nb) {
    throw DataError("recording '" + rec.id + "' is shorter than the baseline window");
  }
  Recording out = rec;
  for (int c = 0; c < rec.channels; ++c) {
    const double* in = rec.channel(c);
    double sum = 0.0;
    for (std::size_t n = 0; n < nb; ++n) sum += in[n];
    const double mean = sum / static_cast<double>(nb);
    double* o = out.channel(c);
    for (std::size_t n = 0; n < rec.n_samples; ++n) o[n] = in[n] - mean;
  }
  return out;
}

Recording bandpass_filter(const Recording& rec, double sampling_rate, double low_hz, double high_hz, int order) {
  check_shape(rec);
  const SosFilter filter = design_butterworth_bandpass(low_hz, high_hz, order, sampling_rate);
  Recording out = rec;
  for (int c = 0; c < rec.channels; ++c) {
    filter.apply_inplace(std::span<double>(out.channel(c), out.n_samples));
  }
  return out;
}

Recording truncate_tail(const Recording& rec, double sampling_rate, double tail_seconds) {
  check_shape(rec);
  const std::size_t keep = seconds_to_samples(tail_seconds, sampling_rate);
  if (keep == 0) throw ConfigError("tail length must be positive");
  if (rec.n_samples < keep) {
    throw DataError("recording '" + rec.id + "' is shorter than the tail length T");
  }
  Recording out;
  out.id = rec.id;
  out.channels = rec.channels;
  out.n_samples = keep;
  out.raw_label = rec.raw_label;
  out.samples.resize(static_cast<std::size_t>(rec.channels) * keep);
  const std::size_t offset = rec.n_samples - keep;
  for (int c = 0; c < rec.channels; ++c) {
    std::copy_n(rec.channel(c) + offset, keep, out.channel(c));
  }
  return out;
}

std::vector<Window> segment_windows(const Recording& rec, double sampling_rate, Emotion label, int source_id,
                                    double window_seconds) {
  check_shape(rec);
  const std::size_t len = seconds_to_samples(window_seconds, sampling_rate);
  if (len == 0) throw ConfigError("window length must be positive");
  if (rec.n_samples < len) {
    throw DataError("recording '" + rec.id + "' is shorter than one window");
  }
  const std::size_t count = rec.n_samples / len;
  std::vector<Window> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    Window win;
    win.channels = rec.channels;
    win.length = len;
    win.y = label;
    win.source_id = source_id;
    win.recording_id = rec.id;
    win.x.resize(static_cast<std::size_t>(rec.channels) * len);
    for (int c = 0; c < rec.channels; ++c) {
      const double* src = rec.channel(c) + w * len;
      float* dst = win.x.data() + static_cast<std::size_t>(c) * len;
      for (std::size_t n = 0; n < len; ++n) dst[n] = static_cast<float>(src[n]);
    }
    out.push_back(std::move(win));
  }
  return out;
}

}  // namespace dape::signalio
