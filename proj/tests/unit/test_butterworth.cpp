#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dape/error.hpp"
#include "dape/signalio/butterworth.hpp"

namespace {

using dape::signalio::design_butterworth_bandpass;

struct GainPoint {
  double freq;
  double db;
};

// Golden values from scipy.signal: butter(4, [4, 40], btype="bandpass",
// fs=fs, output="sos") evaluated with sosfreqz, and sosfilt of a unit
// impulse.
const GainPoint kGain128[] = {{0.5, -74.686988347248175}, {2.0, -25.968961468289255}, {4.0, -3.0102999566398387},
                              {10.0, -5.0646306305686059e-05}, {20.0, -5.975160273701518e-06},
                              {40.0, -3.010299956639817}, {50.0, -23.422675329262145}};
const GainPoint kGain200[] = {{0.5, -75.392242587112179}, {4.0, -3.0102999566399284},
                              {10.0, -9.5447106194155441e-06}, {40.0, -3.0102999566398125},
                              {60.0, -24.51194366487546}, {90.0, -78.229167870674118}};
const double kImpulse128[] = {
    0.1362017001653186,    0.35539871287787356,   0.065813743698485083,  -0.49095929779508668,
    -0.34164139522688525,  0.036204210289869532,  -0.062762808974384243, -0.097684161807425146,
    0.064252993988208287,  0.059051478636130417,  0.023941138992551084,  0.075519307404942643,
    0.079693942806709772,  0.053874909682326229,  0.060543576452756681,  0.057861244283534917,
    0.03887780595530943,   0.031029243159101036,  0.024057714232330787,  0.010738315681118603,
    0.0014914246974086862, -0.0049778270360871027, -0.012778279315379972, -0.018549496493457572};
const double kImpulse200[] = {
    0.033350848426110039,  0.15510860954133682,   0.26929735516384257,   0.15919716785715882,
    -0.14053447566981081,  -0.32988399268683055,  -0.26768381555889653,  -0.1034618346517822,
    -0.017823621648222966, -0.030217911187773405, -0.055321778209390021, -0.039359392759300726,
    0.0001387130020251634, 0.026471577227467086,  0.030910417070345898,  0.0287538738172055,
    0.032498785049727731,  0.040555312032407843,  0.045784452986216403,  0.045707233583473623,
    0.04308349025060005,   0.040810207825241272,  0.039073636895088817,  0.036623188568507867};

TEST(Butterworth, GainMatchesReferenceDesign128) {
  const auto f = design_butterworth_bandpass(4.0, 40.0, 4, 128.0);
  for (const auto& p : kGain128) EXPECT_NEAR(f.gain_db(p.freq, 128.0), p.db, 1e-8) << p.freq << " Hz";
  EXPECT_LT(f.gain_db(64.0, 128.0), -100.0);  // zero at Nyquist
}

TEST(Butterworth, GainMatchesReferenceDesign200) {
  const auto f = design_butterworth_bandpass(4.0, 40.0, 4, 200.0);
  for (const auto& p : kGain200) EXPECT_NEAR(f.gain_db(p.freq, 200.0), p.db, 1e-8) << p.freq << " Hz";
}

TEST(Butterworth, ImpulseResponseMatchesReference) {
  std::vector<double> imp(24, 0.0);
  imp[0] = 1.0;
  const auto h128 = design_butterworth_bandpass(4.0, 40.0, 4, 128.0).apply(imp);
  const auto h200 = design_butterworth_bandpass(4.0, 40.0, 4, 200.0).apply(imp);
  for (std::size_t i = 0; i < imp.size(); ++i) {
    EXPECT_NEAR(h128[i], kImpulse128[i], 1e-12) << i;
    EXPECT_NEAR(h200[i], kImpulse200[i], 1e-12) << i;
  }
}

TEST(Butterworth, ResponseEqualsProductOfSections) {
  const auto f = design_butterworth_bandpass(4.0, 40.0, 4, 128.0);
  EXPECT_EQ(f.sections().size(), 4u);
  EXPECT_TRUE(f.is_stable());
  const std::complex<double> z = std::polar(1.0, 2.0 * M_PI * 13.0 / 128.0);
  std::complex<double> h = 1.0;
  for (const auto& s : f.sections()) {
    const std::complex<double> zi = 1.0 / z;
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  EXPECT_NEAR(std::abs(h - f.response(13.0, 128.0)), 0.0, 1e-14);
}

TEST(Butterworth, RejectsInvalidBands) {
  EXPECT_THROW(design_butterworth_bandpass(40.0, 4.0, 4, 128.0), dape::ConfigError);
  EXPECT_THROW(design_butterworth_bandpass(4.0, 64.0, 4, 128.0), dape::ConfigError);
  EXPECT_THROW(design_butterworth_bandpass(4.0, 40.0, 0, 128.0), dape::ConfigError);
}

TEST(Butterworth, ApplyIsCausal) {
  const auto f = design_butterworth_bandpass(4.0, 40.0, 4, 128.0);
  std::vector<double> x(50, 0.0);
  x[20] = 1.0;
  const auto y = f.apply(x);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(y[i], 0.0);
  EXPECT_NE(y[20], 0.0);
}

}  // namespace
