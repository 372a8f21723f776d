#pragma once

#include <string>
#include <vector>

#include "pitchgram/synth.hpp"

namespace testutil {

/// One synthetic lick: tones plus the total render length.
struct Lick {
  std::string name;
  std::vector<pitchgram::ToneSpec> tones;
  double total_s = 0.0;
  bool tremolo = false;
  bool vibrato = false;
  bool chord = false;
};

inline pitchgram::ToneSpec lick_tone(int pitch, double onset_s, double duration_s,
                                     double amplitude, double decay_ratio = 0.5,
                                     double envelope = 1.5) {
  pitchgram::ToneSpec t;
  t.pitch = pitch;
  t.onset_s = onset_s;
  t.duration_s = duration_s;
  t.amplitude = amplitude;
  t.partial_decay_ratio = decay_ratio;
  t.partial_count = 4;
  t.amplitude_envelope = envelope;
  t.attack_s = 0.008;
  return t;
}

/// The ten-lick synthetic corpus: monophonic melodies across the playing
/// range plus one tremolo, one vibrato and one two-note-chord lick.
inline std::vector<Lick> lick_corpus() {
  using pitchgram::ToneSpec;
  std::vector<Lick> corpus;

  {
    Lick l{.name = "arp_up"};
    l.tones = {lick_tone(57, 0.11, 0.44, 0.90), lick_tone(60, 0.61, 0.44, 0.80),
               lick_tone(64, 1.11, 0.44, 0.85), lick_tone(69, 1.61, 0.44, 0.75)};
    l.total_s = 2.4;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "scale_mid"};
    l.tones = {lick_tone(62, 0.11, 0.44, 0.85, 0.55),
               lick_tone(64, 0.61, 0.44, 0.80, 0.55),
               lick_tone(66, 1.11, 0.44, 0.90, 0.55),
               lick_tone(67, 1.61, 0.44, 0.75, 0.55),
               lick_tone(69, 2.11, 0.89, 0.85, 0.55)};
    l.total_s = 3.4;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "low_half_notes"};
    l.tones = {lick_tone(55, 0.11, 0.94, 0.90, 0.5, 1.0),
               lick_tone(57, 1.11, 0.94, 0.85, 0.5, 1.0),
               lick_tone(59, 2.11, 0.94, 0.90, 0.5, 1.0)};
    l.total_s = 3.4;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "high_quarters"};
    l.tones = {lick_tone(76, 0.11, 0.44, 0.85, 0.55),
               lick_tone(79, 0.61, 0.44, 0.90, 0.55),
               lick_tone(81, 1.11, 0.44, 0.80, 0.55),
               lick_tone(83, 1.61, 0.44, 0.85, 0.55)};
    l.total_s = 2.4;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "leaps"};
    l.tones = {lick_tone(55, 0.11, 0.44, 0.90), lick_tone(67, 0.61, 0.44, 0.80),
               lick_tone(60, 1.11, 0.44, 0.85), lick_tone(72, 1.61, 0.44, 0.90)};
    l.total_s = 2.4;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "three_note"};
    l.tones = {lick_tone(57, 0.11, 0.44, 0.90), lick_tone(60, 0.61, 0.44, 0.85),
               lick_tone(64, 1.11, 0.44, 0.80)};
    l.total_s = 1.9;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "repeated_notes"};
    l.tones = {lick_tone(62, 0.11, 0.40, 0.90), lick_tone(62, 0.61, 0.40, 0.75),
               lick_tone(62, 1.11, 0.40, 0.85), lick_tone(62, 1.61, 0.40, 0.80)};
    l.total_s = 2.3;
    corpus.push_back(l);
  }
  {
    // Six back-to-back restrikes of one pitch, every 8 analysis frames; the
    // string never stops ringing between picks.
    Lick l{.name = "tremolo", .tremolo = true};
    const double strike = 8.0 * 1024.0 / 44100.0;
    for (int k = 0; k < 6; ++k)
      l.tones.push_back(lick_tone(64, 0.11 + k * strike, strike, 0.9, 0.5, 6.0));
    l.total_s = 0.11 + 6 * strike + 0.5;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "vibrato", .vibrato = true};
    ToneSpec a = lick_tone(59, 0.11, 1.19, 0.90, 0.5, 0.5);
    a.vibrato_extent_cents = 50.0;
    a.vibrato_rate_hz = 5.0;
    ToneSpec b = lick_tone(64, 1.41, 1.19, 0.85, 0.5, 0.5);
    b.vibrato_extent_cents = 50.0;
    b.vibrato_rate_hz = 5.0;
    l.tones = {a, b};
    l.total_s = 2.9;
    corpus.push_back(l);
  }
  {
    Lick l{.name = "chord_then_single", .chord = true};
    l.tones = {lick_tone(57, 0.11, 0.94, 0.80), lick_tone(61, 0.11, 0.94, 0.80),
               lick_tone(64, 1.16, 0.44, 0.85)};
    l.total_s = 1.9;
    corpus.push_back(l);
  }
  return corpus;
}

}  // namespace testutil
