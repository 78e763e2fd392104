#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace dape::signalio {

// One second-order section, normalised so that a0 = 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const;
  std::array<std::complex<double>, 2> poles() const;
};

// Cascade of second-order sections.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const { return sections_; }

  // Complex frequency response at `freq_hz` for sampling rate `fs`.
  std::complex<double> response(double freq_hz, double fs) const;
  double gain_db(double freq_hz, double fs) const;
  bool is_stable() const;

  // Causal filtering from a zero initial state (transposed direct form II).
  std::vector<double> apply(std::span<const double> x) const;
  void apply_inplace(std::span<double> x) const;

 private:
  std::vector<Biquad> sections_;
};

// Butterworth band-pass of prototype order `order` (the resulting filter
// has 2*order poles, realised as `order` sections). The analog prototype is
// mapped with the low-pass to band-pass transform at pre-warped band edges
// and discretised with the bilinear transform, so the gain at `low` and
// `high` is exactly -3.01 dB. Throws ConfigError unless
// 0 < low < high < fs/2 and order >= 1.
SosFilter design_butterworth_bandpass(double low_hz, double high_hz, int order, double fs);

}  // namespace dape::signalio
