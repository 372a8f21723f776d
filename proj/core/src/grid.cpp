#include "pitchgram/grid.hpp"

#include <algorithm>

namespace pitchgram {

int PitchGrid::max_period() const {
  int best = 0;
  for (std::size_t j = 0; j < size(); ++j) best = std::max(best, period(j));
  return best;
}

int PitchGrid::channel_of(int pitch) const {
  auto it = std::lower_bound(pitches.begin(), pitches.end(), pitch);
  if (it == pitches.end() || *it != pitch) return -1;
  return static_cast<int>(it - pitches.begin());
}

void PitchGrid::validate() const {
  if (pitches.empty()) throw std::invalid_argument("pitch grid: empty grid");
  if (sample_rate_hz <= 0)
    throw std::invalid_argument("pitch grid: sample rate must be positive");
  if (tuning_hz <= 0.0)
    throw std::invalid_argument("pitch grid: tuning must be positive");
  if (!std::is_sorted(pitches.begin(), pitches.end()) ||
      std::adjacent_find(pitches.begin(), pitches.end()) != pitches.end())
    throw std::invalid_argument("pitch grid: pitches must be strictly ascending");
  for (std::size_t j = 0; j < size(); ++j) {
    if (pitches[j] < 0 || pitches[j] > 127)
      throw std::invalid_argument("pitch grid: pitch outside MIDI range");
    // The second harmonic must stay resolvable and the period must hold at
    // least two samples, otherwise the bident has nothing to grip.
    if (frequency(j) >= sample_rate_hz / 4.0)
      throw std::invalid_argument("pitch grid: pitch " +
                                  std::to_string(pitches[j]) +
                                  " exceeds sample_rate / 4");
    if (period(j) < 2)
      throw std::invalid_argument("pitch grid: period below 2 samples at pitch " +
                                  std::to_string(pitches[j]));
  }
}

PitchGrid make_pitch_grid(int pitch_low, int pitch_high, double tuning_hz,
                          int sample_rate_hz) {
  if (pitch_low > pitch_high)
    throw std::invalid_argument("pitch grid: low pitch above high pitch");
  PitchGrid grid;
  grid.tuning_hz = tuning_hz;
  grid.sample_rate_hz = sample_rate_hz;
  for (int p = pitch_low; p <= pitch_high; ++p) grid.pitches.push_back(p);
  grid.validate();
  return grid;
}

}  // namespace pitchgram
