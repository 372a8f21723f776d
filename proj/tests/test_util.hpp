#pragma once

#include <unistd.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "pitchgram/signal.hpp"
#include "pitchgram/synth.hpp"

namespace testutil {

inline std::string temp_path(const std::string& name) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() / "pitchgram_tests";
  std::filesystem::create_directories(dir);
  return (dir / (std::to_string(getpid()) + "_" + std::to_string(counter++) +
                 "_" + name))
      .string();
}

inline std::vector<double> sine(double freq_hz, double amplitude, int samples,
                                double sample_rate) {
  std::vector<double> x(samples);
  for (int n = 0; n < samples; ++n)
    x[n] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * n / sample_rate);
  return x;
}

/// Naive DFT magnitude at one frequency; the independent spectral oracle used
/// instead of the library FFT.
inline std::complex<double> dft_at(const std::vector<double>& x, double freq_hz,
                                   double sample_rate) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double phase = -2.0 * std::numbers::pi * freq_hz * n / sample_rate;
    acc += x[n] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return acc;
}

inline pitchgram::ToneSpec tone(int pitch, double onset_s, double duration_s,
                                double decay_ratio = 0.6, int partials = 4,
                                double envelope = 1.5, double amplitude = 0.9) {
  pitchgram::ToneSpec t;
  t.pitch = pitch;
  t.onset_s = onset_s;
  t.duration_s = duration_s;
  t.partial_decay_ratio = decay_ratio;
  t.partial_count = partials;
  t.amplitude_envelope = envelope;
  t.amplitude = amplitude;
  return t;
}

}  // namespace testutil
