#include "pitchgram/signal.hpp"

#include <cmath>

namespace pitchgram {

void AudioBuffer::validate() const {
  if (sample_rate_hz <= 0)
    throw std::invalid_argument("audio buffer: sample rate must be positive");
  if (samples.empty())
    throw std::invalid_argument("audio buffer: empty signal");
  for (double s : samples)
    if (!std::isfinite(s))
      throw std::invalid_argument("audio buffer: non-finite sample");
}

double rms(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return std::sqrt(acc / static_cast<double>(samples.size()));
}

double dbfs_to_linear(double dbfs) { return std::pow(10.0, dbfs / 20.0); }

AudioBuffer normalize_rms(const AudioBuffer& buf, double target_dbfs) {
  buf.validate();
  const double level = rms(buf.samples);
  if (level <= 0.0)
    throw std::runtime_error("normalize_rms: silent input (RMS = 0)");
  const double gain = dbfs_to_linear(target_dbfs) / level;
  AudioBuffer out = buf;
  for (double& s : out.samples) s *= gain;
  return out;
}

}  // namespace pitchgram
