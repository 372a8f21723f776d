#pragma once

#include <string>
#include <vector>

#include "pitchgram/signal.hpp"

namespace pitchgram {

/// One synthetic tone: a decaying harmonic series with optional vibrato.
/// Partial k (1-based) sits at k*f0 with amplitude partial_decay_ratio^(k-1).
struct ToneSpec {
  int pitch = 69;
  double onset_s = 0.0;
  double duration_s = 1.0;
  int partial_count = 4;
  double partial_decay_ratio = 0.6;   // in (0, 1]
  double amplitude = 1.0;             // peak scale of the first partial
  double amplitude_envelope = 0.0;    // exponential decay constant, 1/s
  double attack_s = 0.0;              // linear onset ramp
  double vibrato_extent_cents = 0.0;  // peak deviation either side
  double vibrato_rate_hz = 0.0;
};

struct SynthResult {
  AudioBuffer audio;
  std::vector<NoteEvent> notes;  // reference events on the frame grid
};

/// Renders the tones into one buffer and emits the matching reference
/// note events quantized at frame_period_s. All partial phases start at
/// zero. Throws if any partial would cross the Nyquist frequency.
SynthResult synthesize(const std::vector<ToneSpec>& specs, int sample_rate_hz,
                       double total_s, double frame_period_s,
                       double tuning_hz = 440.0);

/// Parses the line-oriented tone fixture format: `key = value` lines, one
/// tone per blank-line-separated stanza, `#` starts a comment.
std::vector<ToneSpec> parse_tone_specs(const std::string& text);
std::vector<ToneSpec> load_tone_specs(const std::string& path);

}  // namespace pitchgram
