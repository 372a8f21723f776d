#include "pitchgram/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pitchgram {

long BinaryMask::count() const {
  long n = 0;
  for (uint8_t c : cells) n += c != 0;
  return n;
}

namespace {

void check_shapes(const BinaryMask& a, const BinaryMask& b) {
  if (a.frames != b.frames || a.n_pitches != b.n_pitches ||
      a.pitch_low != b.pitch_low)
    throw std::invalid_argument("mask shape mismatch");
}

}  // namespace

BinaryMask notes_to_mask(const std::vector<NoteEvent>& notes,
                         double frame_period_s, double grid_step_s,
                         int pitch_low, int pitch_high, double total_s,
                         bool with_velocity) {
  if (grid_step_s <= 0.0)
    throw std::invalid_argument("notes_to_mask: grid step must be positive");
  if (frame_period_s <= 0.0)
    throw std::invalid_argument("notes_to_mask: frame period must be positive");
  if (pitch_low > pitch_high)
    throw std::invalid_argument("notes_to_mask: inverted pitch range");

  BinaryMask mask;
  mask.frames = std::max(1, static_cast<int>(std::ceil(total_s / grid_step_s - 1e-9)));
  mask.n_pitches = pitch_high - pitch_low + 1;
  mask.pitch_low = pitch_low;
  mask.step_s = grid_step_s;
  mask.cells.assign(static_cast<std::size_t>(mask.frames) * mask.n_pitches, 0);
  if (with_velocity) mask.velocities.assign(mask.cells.size(), 0);

  std::vector<double> best_overlap;
  if (with_velocity) best_overlap.assign(mask.cells.size(), 0.0);

  for (const NoteEvent& n : notes) {
    if (n.pitch < pitch_low || n.pitch > pitch_high)
      throw std::invalid_argument("notes_to_mask: note pitch " +
                                  std::to_string(n.pitch) +
                                  " outside the mask range");
    const double on_s = n.onset_frame * frame_period_s;
    const double off_s = n.offset_frame * frame_period_s;
    const int channel = n.pitch - pitch_low;
    const int k_first = std::max(0, static_cast<int>(std::floor(on_s / grid_step_s)));
    const int k_last =
        std::min(mask.frames - 1, static_cast<int>(std::ceil(off_s / grid_step_s)));
    for (int k = k_first; k <= k_last; ++k) {
      const double cell_on = k * grid_step_s;
      const double cell_off = cell_on + grid_step_s;
      const double overlap = std::min(off_s, cell_off) - std::max(on_s, cell_on);
      if (overlap + 1e-12 >= 0.5 * grid_step_s) {
        const std::size_t i = mask.index(k, channel);
        mask.cells[i] = 1;
        if (with_velocity && overlap >= best_overlap[i]) {
          best_overlap[i] = overlap;
          mask.velocities[i] = static_cast<uint8_t>(std::clamp(n.velocity, 1, 127));
        }
      }
    }
  }
  return mask;
}

EvalReport f_measure(const BinaryMask& detected, const BinaryMask& reference,
                     bool velocity_weighted) {
  check_shapes(detected, reference);
  if (velocity_weighted && detected.velocities.empty())
    throw std::invalid_argument("f_measure: detected mask carries no velocities");

  EvalReport r;
  r.velocity_weighted = velocity_weighted;
  double det_weight = 0.0, hit_weight = 0.0;
  long hits = 0;
  for (std::size_t i = 0; i < detected.cells.size(); ++i) {
    const bool d = detected.cells[i] != 0;
    const bool t = reference.cells[i] != 0;
    r.detected_cells += d;
    r.reference_cells += t;
    hits += d && t;
    if (d) {
      const double w = velocity_weighted ? detected.velocities[i] : 1.0;
      det_weight += w;
      if (t) hit_weight += w;
    }
  }
  r.precision = det_weight > 0.0 ? hit_weight / det_weight : 0.0;
  r.recall = r.reference_cells > 0
                 ? static_cast<double>(hits) / r.reference_cells
                 : 0.0;
  r.f_measure = r.precision + r.recall > 0.0
                    ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                    : 0.0;
  return r;
}

namespace {

void frame_errors(const BinaryMask& detected, const BinaryMask& reference,
                  int frame, long& substitutions, long& deletions,
                  long& insertions) {
  long misses = 0, extras = 0;
  for (int j = 0; j < reference.n_pitches; ++j) {
    const bool d = detected.at(frame, j);
    const bool t = reference.at(frame, j);
    misses += t && !d;
    extras += d && !t;
  }
  const long s = std::min(misses, extras);
  substitutions += s;
  deletions += misses - s;
  insertions += extras - s;
}

}  // namespace

EvalReport error_score(const BinaryMask& detected, const BinaryMask& reference) {
  check_shapes(detected, reference);
  EvalReport r;
  r.reference_cells = reference.count();
  r.detected_cells = detected.count();
  if (r.reference_cells == 0)
    throw std::invalid_argument("error_score: empty reference mask");
  for (int k = 0; k < reference.frames; ++k)
    frame_errors(detected, reference, k, r.substitutions, r.deletions,
                 r.insertions);
  r.error_score =
      static_cast<double>(r.substitutions + r.deletions + r.insertions) /
      r.reference_cells;
  return r;
}

EvalReport evaluate(const BinaryMask& detected, const BinaryMask& reference,
                    bool velocity_weighted) {
  EvalReport r = f_measure(detected, reference, velocity_weighted);
  const EvalReport e = error_score(detected, reference);
  r.substitutions = e.substitutions;
  r.deletions = e.deletions;
  r.insertions = e.insertions;
  r.error_score = e.error_score;
  return r;
}

TransitionCounts transition_decomposition(const BinaryMask& detected,
                                          const BinaryMask& reference,
                                          int window_frames) {
  check_shapes(detected, reference);
  if (window_frames < 1)
    throw std::invalid_argument("transition_decomposition: window must be >= 1");

  // Transition frames are read off the reference mask itself: a cell opens a
  // note when the cell below it in time is clear, and closes one when the
  // cell above is clear.
  std::vector<uint8_t> near_onset(reference.frames, 0);
  std::vector<uint8_t> near_decay(reference.frames, 0);
  auto mark = [&](std::vector<uint8_t>& flags, int k) {
    const int a = std::max(0, k - window_frames);
    const int b = std::min(reference.frames - 1, k + window_frames);
    for (int i = a; i <= b; ++i) flags[i] = 1;
  };
  for (int k = 0; k < reference.frames; ++k)
    for (int j = 0; j < reference.n_pitches; ++j) {
      if (!reference.at(k, j)) continue;
      if (k == 0 || !reference.at(k - 1, j)) mark(near_onset, k);
      if (k == reference.frames - 1 || !reference.at(k + 1, j)) mark(near_decay, k);
    }

  TransitionCounts out;
  for (int k = 0; k < reference.frames; ++k) {
    if (near_onset[k])
      frame_errors(detected, reference, k, out.onset_substitutions,
                   out.onset_deletions, out.onset_insertions);
    if (near_decay[k])
      frame_errors(detected, reference, k, out.decay_substitutions,
                   out.decay_deletions, out.decay_insertions);
  }
  return out;
}

std::string EvalReport::to_kv_text() const {
  std::ostringstream s;
  s << "precision = " << precision << '\n'
    << "recall = " << recall << '\n'
    << "f_measure = " << f_measure << '\n'
    << "error_score = " << error_score << '\n'
    << "substitutions = " << substitutions << '\n'
    << "deletions = " << deletions << '\n'
    << "insertions = " << insertions << '\n'
    << "reference_cells = " << reference_cells << '\n'
    << "detected_cells = " << detected_cells << '\n'
    << "velocity_weighted = " << (velocity_weighted ? 1 : 0) << '\n';
  return s.str();
}

std::string EvalReport::csv_header() {
  return "label,precision,recall,f_measure,error_score,substitutions,"
         "deletions,insertions,reference_cells,detected_cells";
}

std::string EvalReport::to_csv_row(const std::string& label) const {
  std::ostringstream s;
  s << label << ',' << precision << ',' << recall << ',' << f_measure << ','
    << error_score << ',' << substitutions << ',' << deletions << ','
    << insertions << ',' << reference_cells << ',' << detected_cells;
  return s.str();
}

}  // namespace pitchgram
