#pragma once

#include <vector>

#include "dape/signalio/types.hpp"

namespace dape::signalio {

// Subtracts, per channel, the mean of the first `baseline_seconds` of the
// input from every sample of that channel.
Recording baseline_correct(const Recording& rec, double sampling_rate, double baseline_seconds = 3.0);

// Causal Butterworth band-pass (see design_butterworth_bandpass) applied to
// every channel. Output length equals input length.
Recording bandpass_filter(const Recording& rec, double sampling_rate, double low_hz = 4.0,
                          double high_hz = 40.0, int order = 4);

// Keeps exactly the final round(T * fs) samples of each channel.
Recording truncate_tail(const Recording& rec, double sampling_rate, double tail_seconds);

// floor(N / L) consecutive non-overlapping windows of L = round(window_seconds * fs)
// samples; the trailing remainder is dropped. Every window carries `label`.
std::vector<Window> segment_windows(const Recording& rec, double sampling_rate, Emotion label,
                                    int source_id, double window_seconds = 2.0);

}  // namespace dape::signalio
