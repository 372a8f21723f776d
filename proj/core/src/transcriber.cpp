#include "pitchgram/transcriber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pitchgram {

void TranscriberConfig::validate() const {
  if (!(eps1 > eps3) || eps3 < 0.0)
    throw std::invalid_argument("transcriber config: require eps1 > eps3 >= 0");
  if (!(eps2 > 0.0) || !(eps4 < 0.0))
    throw std::invalid_argument("transcriber config: require eps2 > 0 > eps4");
  if (d_min < 1)
    throw std::invalid_argument("transcriber config: d_min must be >= 1");
  if (smoother_len < 3 || smoother_len % 2 == 0)
    throw std::invalid_argument("transcriber config: smoother length must be odd and >= 3");
}

double smoothed_score(std::span<const double> history, SmootherKind kind,
                      int length) {
  if (history.empty())
    throw std::invalid_argument("smoothed_score: empty history");
  // The window reaches back over the zero-padded past, so early frames are
  // averaged against silence just like the convolution G * Y would do.
  const int have = static_cast<int>(std::min<std::size_t>(history.size(), length));
  const auto tail = history.last(have);
  if (kind == SmootherKind::MovingAverage) {
    double acc = 0.0;
    for (double v : tail) acc += v;
    return acc / length;
  }
  std::vector<double> window(length, 0.0);
  std::copy(tail.begin(), tail.end(), window.end() - have);
  std::nth_element(window.begin(), window.begin() + length / 2, window.end());
  return window[length / 2];
}

double normalized_derivative(std::span<const double> history,
                             const TranscriberConfig& cfg) {
  if (history.empty())
    throw std::invalid_argument("normalized_derivative: empty history");
  const double smoothed = smoothed_score(history, cfg.smoother, cfg.smoother_len);
  if (smoothed <= 0.0) return 0.0;
  const double prev = history.size() >= 2 ? history[history.size() - 2] : 0.0;
  return (history.back() - prev) / smoothed;
}

std::vector<double> marginal_scores(const Pitchgram& pg) {
  // Positive part only: negative bident channels encode octave evidence, not
  // transient energy, and with ~50 channels they can swamp the row sum.
  std::vector<double> out(pg.frames, 0.0);
  for (int m = 0; m < pg.frames; ++m) {
    double acc = 0.0;
    for (int j = 0; j < pg.n_pitches(); ++j) acc += std::max(pg.at(m, j), 0.0);
    out[m] = acc;
  }
  return out;
}

std::vector<NoteEvent> prune(std::vector<NoteEvent> notes, int d_min) {
  std::erase_if(notes, [d_min](const NoteEvent& n) {
    return n.duration_frames() <= d_min;
  });
  return notes;
}

int map_velocity(double score, const TranscriberConfig& cfg) {
  const long v = std::lround(cfg.velocity_scale * score + cfg.velocity_offset);
  return static_cast<int>(std::clamp(v, 1L, 127L));
}

namespace {

// Incremental causal score tracker for one pitchgram: per-channel smoothed
// value, raw delta and normalized derivative, advanced frame by frame.
class ScoreTracker {
 public:
  ScoreTracker(const Pitchgram& pg, SmootherKind kind, int length)
      : pg_(pg),
        kind_(kind),
        length_(length),
        ring_(static_cast<std::size_t>(pg.n_pitches()) * length, 0.0),
        sums_(pg.n_pitches(), 0.0),
        prev_(pg.n_pitches(), 0.0),
        delta_(pg.n_pitches(), 0.0),
        prev_delta_(pg.n_pitches(), 0.0),
        smooth_(pg.n_pitches(), 0.0) {}

  void advance(int m) {
    const int p = pg_.n_pitches();
    for (int j = 0; j < p; ++j) {
      const double y = pg_.at(m, j);
      double* ring = ring_.data() + static_cast<std::size_t>(j) * length_;
      const int slot = m % length_;
      sums_[j] += y - ring[slot];
      ring[slot] = y;
      prev_delta_[j] = delta_[j];
      delta_[j] = y - (m > 0 ? prev_[j] : 0.0);
      prev_[j] = y;
      if (kind_ == SmootherKind::MovingAverage) {
        smooth_[j] = sums_[j] / length_;
      } else {
        double window[64];
        std::copy(ring, ring + length_, window);
        std::nth_element(window, window + length_ / 2, window + length_);
        smooth_[j] = window[length_ / 2];
      }
    }
  }

  double value(int m, int j) const { return pg_.at(m, j); }
  double delta(int j) const { return delta_[j]; }
  double prev_delta(int j) const { return prev_delta_[j]; }
  double smoothed(int j) const { return smooth_[j]; }
  double derivative(int j) const {
    return smooth_[j] > 0.0 ? delta_[j] / smooth_[j] : 0.0;
  }

 private:
  const Pitchgram& pg_;
  SmootherKind kind_;
  int length_;
  std::vector<double> ring_, sums_, prev_, delta_, prev_delta_, smooth_;
};

// Same tracking for a scalar series (the pitch-marginal transient score).
class ScalarTracker {
 public:
  ScalarTracker(SmootherKind kind, int length)
      : kind_(kind), length_(length), ring_(length, 0.0) {}

  void advance(int m, double y) {
    const int slot = m % length_;
    sum_ += y - ring_[slot];
    ring_[slot] = y;
    delta_ = y - (m > 0 ? prev_ : 0.0);
    prev_ = y;
    prev_derivative_ = derivative_;
    if (kind_ == SmootherKind::MovingAverage) {
      smooth_ = sum_ / length_;
    } else {
      std::vector<double> window = ring_;
      std::nth_element(window.begin(), window.begin() + length_ / 2, window.end());
      smooth_ = window[length_ / 2];
    }
    derivative_ = smooth_ > 0.0 ? delta_ / smooth_ : 0.0;
  }

  double derivative() const { return derivative_; }
  // The transient spike can lead the per-pitch score change by one frame
  // (the tapered window senses incoming energy before the pitch resolves),
  // so gates test the recent spike rather than this frame alone.
  double recent_derivative() const { return std::max(derivative_, prev_derivative_); }

 private:
  SmootherKind kind_;
  int length_;
  std::vector<double> ring_;
  double sum_ = 0.0, prev_ = 0.0, delta_ = 0.0, smooth_ = 0.0;
  double derivative_ = 0.0, prev_derivative_ = 0.0;
};

struct Channel {
  bool active = false;
  int onset = 0;
  double onset_weighted = 0.0;
  double peak_weighted = 0.0;   // running maxima over the note so far;
  double peak_invariant = 0.0;  // they anchor the decay ambiguity ratio
  double energy = 0.0;          // integrated weighted score over the note
};

}  // namespace

std::vector<NoteEvent> transcribe(const Pitchgram& weighted,
                                  const Pitchgram& invariant,
                                  const TranscriberConfig& cfg) {
  cfg.validate();
  if (cfg.smoother_len > 63)
    throw std::invalid_argument("transcriber config: smoother length above 63");
  if (weighted.frames != invariant.frames ||
      weighted.pitches != invariant.pitches ||
      weighted.hop_samples != invariant.hop_samples)
    throw std::invalid_argument("transcribe: pitchgram shape or grid mismatch");

  const int frames = invariant.frames;
  const int n_ch = invariant.n_pitches();
  ScoreTracker yi(invariant, cfg.smoother, cfg.smoother_len);
  ScoreTracker yw(weighted, cfg.smoother, cfg.smoother_len);
  ScalarTracker transient(cfg.smoother, cfg.smoother_len);

  std::vector<Channel> state(n_ch);
  std::vector<NoteEvent> notes;
  std::vector<double> raw_velocity;  // score feeding the velocity map

  auto close_note = [&](int j, int offset_frame) {
    Channel& ch = state[j];
    NoteEvent n;
    n.pitch = invariant.pitches[j];
    n.onset_frame = ch.onset;
    n.offset_frame = std::max(offset_frame, ch.onset + 1);
    notes.push_back(n);
    raw_velocity.push_back(cfg.velocity_mode == VelocityMode::Onset
                               ? ch.onset_weighted
                               : ch.energy);
    ch.active = false;
  };

  // Vibrato guard: the larger neighbor score joins the decay hypothesis. A
  // neighbor only counts when it can actually carry this note's vibrato:
  // it must hold no active note itself, and neither may the channel right
  // behind it, whose ringing would bleed into the neighbor and keep a dead
  // note alive forever.
  auto vibrato_term = [&](const ScoreTracker& t, int m, int j) {
    auto usable = [&](int nb, int behind) {
      if (nb < 0 || nb >= n_ch || state[nb].active) return false;
      return behind < 0 || behind >= n_ch || !state[behind].active;
    };
    double vib = 0.0;
    bool any = false;
    if (usable(j - 1, j - 2)) {
      vib = t.value(m, j - 1);
      any = true;
    }
    if (usable(j + 1, j + 2)) {
      vib = any ? std::max(vib, t.value(m, j + 1)) : t.value(m, j + 1);
      any = true;
    }
    return any ? vib : 0.0;
  };

  for (int m = 0; m < frames; ++m) {
    yi.advance(m);
    yw.advance(m);
    {
      double row = 0.0;
      for (int j = 0; j < n_ch; ++j) row += std::max(weighted.at(m, j), 0.0);
      transient.advance(m, row);
    }

    // Decay pass over active notes
    for (int j = 0; j < n_ch; ++j) {
      if (!state[j].active || state[j].onset == m) continue;
      const double y = yi.value(m, j);
      const double ydot = yi.derivative(j);
      const double vib = vibrato_term(yi, m, j);
      bool decay = (y + vib < cfg.eps3) && (ydot < cfg.eps4);

      // Fully vanished score: nothing left to track, regardless of slope.
      if (!decay && y <= 0.0 && yi.smoothed(j) <= 0.0) decay = true;

      // Ambiguity band: the invariant score alone cannot tell sustain from
      // release, so consult the power-weighted gram against the level this
      // note reached.
      if (!decay && y >= cfg.eps3 && y <= cfg.eps1) {
        const double ratio =
            state[j].peak_weighted / std::max(state[j].peak_invariant, 1e-12);
        const double w = yw.value(m, j);
        const double wdot = yw.derivative(j);
        const double wvib = vibrato_term(yw, m, j);
        decay = (w + wvib < cfg.eps3 * ratio) && (wdot < cfg.eps4);
      }
      if (decay) close_note(j, m);
    }

    // Onset pass
    for (int j = 0; j < n_ch; ++j) {
      const double y = yi.value(m, j);
      if (state[j].active) {
        state[j].energy += yw.value(m, j);
        state[j].peak_weighted = std::max(state[j].peak_weighted, yw.value(m, j));
        state[j].peak_invariant = std::max(state[j].peak_invariant, y);
        if (!cfg.transient_gate) continue;
        // Re-onset on a still-ringing string: the per-pitch slope is flat, so
        // the pitch-marginal slope acts as the transient evidence. The pitch
        // itself must have gained power this frame.
        if (m - state[j].onset <= std::max(cfg.d_min, 2)) continue;
        if (y <= cfg.eps1) continue;
        if (transient.recent_derivative() <= cfg.eps2) continue;
        if (yw.delta(j) <= 0.0) continue;
        bool peaked = true;
        if (j > 0 && (yi.delta(j) <= yi.delta(j - 1) || y <= yi.value(m, j - 1)))
          peaked = false;
        if (j + 1 < n_ch &&
            (yi.delta(j) <= yi.delta(j + 1) || y <= yi.value(m, j + 1)))
          peaked = false;
        if (!peaked) continue;
        close_note(j, m);
        state[j] = {true, m, yw.value(m, j), yw.value(m, j), y, yw.value(m, j)};
        continue;
      }

      if (y <= cfg.eps1) continue;
      if (yi.derivative(j) <= cfg.eps2) continue;
      if (cfg.rising_slope && yi.delta(j) <= yi.prev_delta(j)) continue;
      // Transient- and fretting-noise guards against both neighbors
      if (j > 0 && (yi.delta(j) <= yi.delta(j - 1) || y <= yi.value(m, j - 1)))
        continue;
      if (j + 1 < n_ch &&
          (yi.delta(j) <= yi.delta(j + 1) || y <= yi.value(m, j + 1)))
        continue;
      if (cfg.octave_rule) {
        // The fundamental owns its harmonic series: no onset while a note is
        // ringing an octave (2nd harmonic) or an octave plus a fifth (3rd
        // harmonic, the bident's blind spot) below.
        bool harmonic_of_active = false;
        for (int interval : {12, 19}) {
          const int below = invariant.channel_of(invariant.pitches[j] - interval);
          if (below >= 0 && state[below].active) harmonic_of_active = true;
        }
        if (harmonic_of_active) continue;
      }
      // A committed onset supersedes attack-born rivals up to two semitones
      // away: a younger, weaker neighbor note was this note's own transient
      // spread, so it is closed immediately (and swept away by pruning).
      for (int nb : {j - 2, j - 1, j + 1, j + 2}) {
        if (nb < 0 || nb >= n_ch || !state[nb].active) continue;
        if (m - state[nb].onset <= cfg.d_min + 1 && state[nb].peak_invariant < y)
          close_note(nb, m);
      }
      state[j] = {true, m, yw.value(m, j), yw.value(m, j), y, yw.value(m, j)};
    }
  }

  for (int j = 0; j < n_ch; ++j)
    if (state[j].active) close_note(j, frames);

  // Velocity mapping, optionally auto-scaled to the loudest onset of the take
  double scale = cfg.velocity_scale, offset = cfg.velocity_offset;
  if (cfg.velocity_auto) {
    double peak = 0.0;
    for (double v : raw_velocity) peak = std::max(peak, v);
    scale = peak > 0.0 ? 127.0 / peak : 0.0;
    offset = 0.0;
  }
  TranscriberConfig vcfg = cfg;
  vcfg.velocity_scale = scale;
  vcfg.velocity_offset = offset;
  for (std::size_t i = 0; i < notes.size(); ++i)
    notes[i].velocity = map_velocity(raw_velocity[i], vcfg);

  notes = prune(std::move(notes), cfg.d_min);
  std::sort(notes.begin(), notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.onset_frame, a.pitch) < std::tie(b.onset_frame, b.pitch);
  });
  return notes;
}

}  // namespace pitchgram
