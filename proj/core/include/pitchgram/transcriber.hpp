#pragma once

#include <span>
#include <vector>

#include "pitchgram/pitchgram.hpp"
#include "pitchgram/signal.hpp"

namespace pitchgram {

enum class SmootherKind { MovingAverage, Median };
enum class VelocityMode { Onset, Integral };

/// All transcriber tunables. The shipped defaults were calibrated on the
/// synthetic fixture corpus; every threshold is exposed through the config
/// file and the CLI.
struct TranscriberConfig {
  double eps1 = 0.16;    // onset score threshold
  double eps2 = 0.35;    // onset slope threshold (normalized derivative)
  double eps3 = 0.05;    // decay score threshold
  double eps4 = -0.10;   // decay slope threshold, negative
  int d_min = 3;         // minimum note duration, frames (strict)
  SmootherKind smoother = SmootherKind::MovingAverage;
  int smoother_len = 5;  // odd, >= 3
  double velocity_scale = 2500.0;
  double velocity_offset = 0.0;
  bool velocity_auto = false;  // rescale so the loudest onset maps to 127
  VelocityMode velocity_mode = VelocityMode::Onset;
  bool transient_gate = true;  // marginal-slope re-onsets (tremolo)
  bool octave_rule = true;     // suppress onsets one octave above an active note
  bool rising_slope = false;   // additionally require the slope to be rising

  void validate() const;
};

/// Causal smoothed value at the last element of the history: moving average
/// of the trailing `length` samples (history is zero-padded before its
/// start), or the running median over the same span.
double smoothed_score(std::span<const double> history, SmootherKind kind,
                      int length);

/// Normalized derivative of the last history element: (Y(m) - Y(m-1)) /
/// smoothed(m), defined as 0 when the smoothed value is not positive.
double normalized_derivative(std::span<const double> history,
                             const TranscriberConfig& cfg);

/// Per-frame pitch-marginal score of a pitchgram row: Y(m) = sum_p Y(m, p).
std::vector<double> marginal_scores(const Pitchgram& pg);

/// Removes every note whose duration is not strictly greater than d_min.
std::vector<NoteEvent> prune(std::vector<NoteEvent> notes, int d_min);

/// Maps a power-weighted onset score to a MIDI velocity.
int map_velocity(double score, const TranscriberConfig& cfg);

/// Runs the causal decision loop over both pitchgram variants: onsets and
/// decays are decided on the power-invariant scores, velocities come from the
/// power-weighted ones, and the power-weighted gram also drives the marginal
/// transient gate and breaks decay ambiguities.
std::vector<NoteEvent> transcribe(const Pitchgram& weighted,
                                  const Pitchgram& invariant,
                                  const TranscriberConfig& cfg);

}  // namespace pitchgram
