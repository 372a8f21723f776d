#pragma once

#include <vector>

#include "pitchgram/bident.hpp"
#include "pitchgram/grid.hpp"
#include "pitchgram/signal.hpp"

namespace pitchgram {

enum class PitchgramVariant { PowerWeighted, PowerInvariant };
enum class Domain { Time, Frequency };
enum class WindowKind { Hamming, Hann };

/// Everything the analysis stages can be tuned with. Defaults follow the
/// shipped configuration file.
struct AnalysisConfig {
  double comb_a = 0.8;          // feed-backward comb scaling factor
  BidentParams bident{};        // alpha = 2, beta = 1, span 12
  KernelKind kernel = KernelKind::Bident;
  bool compression = true;      // signed square root of the ACF
  int hop_samples = 1024;       // analysis grid step (23.2 ms at 44.1 kHz)
  int dft_size = 4096;          // frequency-domain variant only
  WindowKind window = WindowKind::Hamming;
  int pitch_low = 40;           // guitar E2
  int pitch_high = 88;          // guitar E6
  double tuning_hz = 440.0;
  double normalize_dbfs = -20.0;  // reference level for the full pipeline

  void validate() const;
  PitchGrid grid(int sample_rate_hz) const {
    return make_pitch_grid(pitch_low, pitch_high, tuning_hz, sample_rate_hz);
  }
};

/// Time-pitch score matrix Y(m, p). Frame m is computed from the hop-aligned
/// window that ends at sample (m + 1) * hop, so a frame never looks ahead of
/// its own grid instant; the signal is taken as zero before sample 0.
struct Pitchgram {
  std::vector<double> scores;  // frames x pitches, row-major
  int frames = 0;
  int hop_samples = 0;
  int sample_rate_hz = 0;
  std::vector<int> pitches;
  double tuning_hz = 440.0;
  PitchgramVariant variant = PitchgramVariant::PowerWeighted;
  Domain domain = Domain::Time;
  KernelKind kernel = KernelKind::Bident;

  int n_pitches() const { return static_cast<int>(pitches.size()); }
  double frame_period_s() const {
    return static_cast<double>(hop_samples) / sample_rate_hz;
  }
  double& at(int frame, int channel) {
    return scores[static_cast<std::size_t>(frame) * pitches.size() + channel];
  }
  double at(int frame, int channel) const {
    return scores[static_cast<std::size_t>(frame) * pitches.size() + channel];
  }
  int channel_of(int pitch) const;
};

/// Scores folded over octaves into the 12 pitch classes (C = 0 .. B = 11).
struct Chromagram {
  std::vector<double> scores;  // frames x 12, row-major
  int frames = 0;
  int hop_samples = 0;
  int sample_rate_hz = 0;

  double& at(int frame, int pitch_class) {
    return scores[static_cast<std::size_t>(frame) * 12 + pitch_class];
  }
  double at(int frame, int pitch_class) const {
    return scores[static_cast<std::size_t>(frame) * 12 + pitch_class];
  }
};

/// Both variants of one analysis pass. They share the per-frame ACF, so
/// computing the pair costs barely more than either alone.
struct PitchgramPair {
  Pitchgram weighted;
  Pitchgram invariant;
};

PitchgramPair analyze_time(const AudioBuffer& buf, const PitchGrid& grid,
                           const AnalysisConfig& cfg);
PitchgramPair analyze_freq(const AudioBuffer& buf, const PitchGrid& grid,
                           const AnalysisConfig& cfg);

Pitchgram pitchgram_time(const AudioBuffer& buf, const PitchGrid& grid,
                         const AnalysisConfig& cfg, PitchgramVariant variant);
Pitchgram pitchgram_freq(const AudioBuffer& buf, const PitchGrid& grid,
                         const AnalysisConfig& cfg, PitchgramVariant variant);

/// Folds a pitchgram over octaves: Z(m, c) sums Y(m, p) over every grid pitch
/// p of class c. Meant for the sinc-kind pitchgram; requires the grid to span
/// at least one octave.
Chromagram chromagram(const Pitchgram& pg);

/// Elementwise product of the power-weighted and power-invariant variants,
/// normalized by its Frobenius norm. An all-zero product stays all-zero.
Pitchgram posterior_pitchgram(const Pitchgram& weighted, const Pitchgram& invariant);

}  // namespace pitchgram
