#include "dape/signalio/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dape/error.hpp"

namespace dape::signalio {

using cd = std::complex<double>;

cd Biquad::response(cd z) const {
  const cd zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

std::array<cd, 2> Biquad::poles() const {
  // Roots of z^2 + a1 z + a2.
  const cd disc = std::sqrt(cd(a1 * a1 - 4.0 * a2, 0.0));
  return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
}

cd SosFilter::response(double freq_hz, double fs) const {
  const cd z = std::polar(1.0, 2.0 * std::numbers::pi * freq_hz / fs);
  cd h(1.0, 0.0);
  for (const auto& s : sections_) h *= s.response(z);
  return h;
}

double SosFilter::gain_db(double freq_hz, double fs) const {
  return 20.0 * std::log10(std::abs(response(freq_hz, fs)));
}

bool SosFilter::is_stable() const {
  return std::all_of(sections_.begin(), sections_.end(), [](const Biquad& s) {
    const auto p = s.poles();
    return std::abs(p[0]) < 1.0 && std::abs(p[1]) < 1.0;
  });
}

std::vector<double> SosFilter::apply(std::span<const double> x) const {
  std::vector<double> y(x.begin(), x.end());
  apply_inplace(y);
  return y;
}

void SosFilter::apply_inplace(std::span<double> x) const {
  for (const auto& s : sections_) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

SosFilter design_butterworth_bandpass(double low_hz, double high_hz, int order, double fs) {
  if (order < 1) throw ConfigError("butterworth: order must be positive");
  if (!(fs > 0.0)) throw ConfigError("butterworth: sampling rate must be positive");
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0)) {
    throw ConfigError("butterworth: band edges must satisfy 0 < low < high < fs/2");
  }
  const double pi = std::numbers::pi;
  // Pre-warped analog band edges for the bilinear map s = 2 fs (z-1)/(z+1).
  const double k = 2.0 * fs;
  const double w_lo = k * std::tan(pi * low_hz / fs);
  const double w_hi = k * std::tan(pi * high_hz / fs);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  // Analog low-pass prototype: N poles on the unit circle in the left half
  // plane. Each maps to two band-pass poles, roots of s^2 - p bw s + w0^2.
  std::vector<cd> analog;
  for (int i = 0; i < order; ++i) {
    const cd p = std::polar(1.0, pi * (2.0 * i + order + 1) / (2.0 * order));
    const cd half = p * bw / 2.0;
    const cd root = std::sqrt(half * half - w0_sq);
    analog.push_back(half + root);
    analog.push_back(half - root);
  }

  // Analog H(s) = bw^N s^N / prod(s - p_a). The bilinear map sends the N
  // zeros at s=0 to z=1, the N zeros at infinity to z=-1, and scales the
  // gain by k^N / prod(k - p_a).
  cd gain = std::pow(bw * k, order);
  std::vector<cd> poles;
  for (const cd& s : analog) {
    gain /= (k - s);
    poles.push_back((k + s) / (k - s));
  }

  // Pair each pole with its conjugate.
  std::vector<bool> used(poles.size(), false);
  std::vector<std::pair<cd, cd>> pairs;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t best = poles.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(poles[j] - std::conj(poles[i]));
      if (best == poles.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    used[best] = true;
    pairs.emplace_back(poles[i], poles[best]);
  }
  // Least damped section last.
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return std::abs(a.first) < std::abs(b.first);
  });

  std::vector<Biquad> sections;
  for (const auto& [p1, p2] : pairs) {
    Biquad s;
    // Numerator (1 - z^-1)(1 + z^-1) = 1 - z^-2.
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -(p1 + p2).real();
    s.a2 = (p1 * p2).real();
    sections.push_back(s);
  }
  const double g = gain.real();
  sections.front().b0 *= g;
  sections.front().b1 *= g;
  sections.front().b2 *= g;
  return SosFilter(std::move(sections));
}

}  // namespace dape::signalio
