#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pitchgram {

/// Twelve-tone equal temperament mapping: f0 = tuning * 2^((p - 69) / 12).
inline double midi_to_frequency(int pitch, double tuning_hz = 440.0) {
  if (tuning_hz <= 0.0)
    throw std::invalid_argument("midi_to_frequency: tuning must be positive");
  return tuning_hz * std::pow(2.0, (pitch - 69) / 12.0);
}

/// The set of analysis channels: one per MIDI pitch, each with its period in
/// samples. Channel periods are nearest-integer roundings of fs / f0.
struct PitchGrid {
  std::vector<int> pitches;  // ascending MIDI numbers
  double tuning_hz = 440.0;
  int sample_rate_hz = 44100;

  std::size_t size() const { return pitches.size(); }
  double frequency(std::size_t channel) const {
    return midi_to_frequency(pitches[channel], tuning_hz);
  }
  int period(std::size_t channel) const {
    return static_cast<int>(std::lround(sample_rate_hz / frequency(channel)));
  }
  /// Longest channel period (the lowest pitch).
  int max_period() const;
  /// Channel index of a MIDI pitch, or -1 when outside the grid.
  int channel_of(int pitch) const;

  void validate() const;
};

PitchGrid make_pitch_grid(int pitch_low, int pitch_high, double tuning_hz,
                          int sample_rate_hz);

}  // namespace pitchgram
