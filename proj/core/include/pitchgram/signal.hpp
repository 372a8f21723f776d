#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace pitchgram {

/// Mono audio signal, full-scale +-1.0.
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 44100;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  void validate() const;
};

/// One transcribed note on a fixed analysis frame grid. offset_frame is
/// exclusive: the note sounds over [onset_frame, offset_frame).
struct NoteEvent {
  int pitch = 0;         // MIDI note number, 0..127
  int onset_frame = 0;
  int offset_frame = 0;
  int velocity = 64;     // 1..127

  int duration_frames() const { return offset_frame - onset_frame; }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

double rms(std::span<const double> samples);

double dbfs_to_linear(double dbfs);

/// Rescales the buffer so its RMS equals 10^(target_dbfs/20).
/// Throws std::runtime_error on silent input.
AudioBuffer normalize_rms(const AudioBuffer& buf, double target_dbfs);

}  // namespace pitchgram
