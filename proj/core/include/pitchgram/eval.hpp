#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitchgram/signal.hpp"

namespace pitchgram {

/// Boolean time-pitch grid: the evaluation currency. When built with
/// velocities, each true cell also carries the velocity of its note.
struct BinaryMask {
  int frames = 0;
  int n_pitches = 0;
  int pitch_low = 0;
  double step_s = 0.0;
  std::vector<uint8_t> cells;       // frames x pitches, row-major
  std::vector<uint8_t> velocities;  // parallel to cells, empty if unused

  bool at(int frame, int channel) const {
    return cells[static_cast<std::size_t>(frame) * n_pitches + channel] != 0;
  }
  std::size_t index(int frame, int channel) const {
    return static_cast<std::size_t>(frame) * n_pitches + channel;
  }
  long count() const;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double error_score = 0.0;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long reference_cells = 0;
  long detected_cells = 0;
  bool velocity_weighted = false;

  std::string to_kv_text() const;
  static std::string csv_header();
  std::string to_csv_row(const std::string& label) const;
};

/// S/D/I counts restricted to grid frames around reference note transitions.
struct TransitionCounts {
  long onset_substitutions = 0, onset_deletions = 0, onset_insertions = 0;
  long decay_substitutions = 0, decay_deletions = 0, decay_insertions = 0;
};

/// Quantizes note events onto a time grid: a cell is set when a note covers
/// at least half of it. Note frames are converted to seconds through
/// frame_period_s. Throws for notes outside the pitch range.
BinaryMask notes_to_mask(const std::vector<NoteEvent>& notes,
                         double frame_period_s, double grid_step_s,
                         int pitch_low, int pitch_high, double total_s,
                         bool with_velocity = false);

/// Precision, recall and F-measure over true cells. With velocity weighting
/// each detected cell contributes its note velocity to both sides of the
/// precision ratio; recall stays unweighted.
EvalReport f_measure(const BinaryMask& detected, const BinaryMask& reference,
                     bool velocity_weighted = false);

/// Word-error-rate analogue: per grid frame, substitutions pair up misses
/// with extras, the remainder split into deletions and insertions, and the
/// total is normalized by the reference cell count.
EvalReport error_score(const BinaryMask& detected, const BinaryMask& reference);

/// Both metrics in one report.
EvalReport evaluate(const BinaryMask& detected, const BinaryMask& reference,
                    bool velocity_weighted = false);

/// Error composition near transition points: counts restricted to frames
/// within +-window_frames of reference onsets resp. offsets.
TransitionCounts transition_decomposition(const BinaryMask& detected,
                                          const BinaryMask& reference,
                                          int window_frames);

}  // namespace pitchgram
