#include "pitchgram/pitchgram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pitchgram/acf.hpp"
#include "pitchgram/comb.hpp"
#include "fft_internal.hpp"
#include "parallel_internal.hpp"

namespace pitchgram {

namespace {

constexpr double kSemitoneRatio = 1.0594630943592953;  // 2^(1/12)

// Fixed alignment of the frequency-domain score scale to the time-domain
// one, measured once on a full-scale A3 reference tone at the default
// configuration. Keeps one set of transcriber thresholds valid for both
// domains.
constexpr double kFreqWeightedAlign = 0.464;
constexpr double kFreqInvariantAlign = 0.390;

int frame_count(std::size_t n_samples, int hop) {
  return static_cast<int>(n_samples / static_cast<std::size_t>(hop));
}

// Copies the window that ends at `end` (exclusive) into scratch, zero-padding
// anything outside the signal.
void gather_frame(std::span<const double> x, long end, int length,
                  std::vector<double>& scratch) {
  scratch.resize(length);
  const long begin = end - length;
  for (int i = 0; i < length; ++i) {
    const long n = begin + i;
    scratch[i] = n >= 0 && n < static_cast<long>(x.size())
                     ? x[static_cast<std::size_t>(n)]
                     : 0.0;
  }
}

Pitchgram make_gram(const PitchGrid& grid, const AnalysisConfig& cfg, int frames,
                    PitchgramVariant variant, Domain domain) {
  Pitchgram pg;
  pg.frames = frames;
  pg.hop_samples = cfg.hop_samples;
  pg.sample_rate_hz = grid.sample_rate_hz;
  pg.pitches = grid.pitches;
  pg.tuning_hz = grid.tuning_hz;
  pg.variant = variant;
  pg.domain = domain;
  pg.kernel = cfg.kernel;
  pg.scores.assign(static_cast<std::size_t>(frames) * grid.size(), 0.0);
  return pg;
}

}  // namespace

void AnalysisConfig::validate() const {
  if (comb_a <= -1.0 || comb_a >= 1.0)
    throw std::invalid_argument("analysis config: comb a must lie in (-1, 1)");
  if (hop_samples < 1)
    throw std::invalid_argument("analysis config: hop must be >= 1 sample");
  if (!detail::is_power_of_two(static_cast<std::size_t>(dft_size)))
    throw std::invalid_argument("analysis config: dft_size must be a power of two");
  if (pitch_low > pitch_high)
    throw std::invalid_argument("analysis config: pitch range is inverted");
  if (tuning_hz <= 0.0)
    throw std::invalid_argument("analysis config: tuning must be positive");
  if (bident.alpha <= 0.0 || bident.beta < 0.0 || bident.span_periods < 1)
    throw std::invalid_argument("analysis config: invalid bident weights");
}

int Pitchgram::channel_of(int pitch) const {
  auto it = std::lower_bound(pitches.begin(), pitches.end(), pitch);
  if (it == pitches.end() || *it != pitch) return -1;
  return static_cast<int>(it - pitches.begin());
}

PitchgramPair analyze_time(const AudioBuffer& buf, const PitchGrid& grid,
                           const AnalysisConfig& cfg) {
  buf.validate();
  grid.validate();
  cfg.validate();
  if (buf.sample_rate_hz != grid.sample_rate_hz)
    throw std::invalid_argument("pitchgram_time: buffer/grid sample rate mismatch");

  const int span = cfg.bident.span_periods;
  const int n0_max = grid.max_period();
  const int max_lag = span * n0_max;
  // One extra period of context so every channel has all of its lags covered
  // by actual data pairs.
  const int frame_len = (span + 1) * n0_max;
  if (buf.samples.size() < static_cast<std::size_t>(frame_len))
    throw std::invalid_argument(
        "pitchgram_time: buffer shorter than one frame at the lowest pitch (" +
        std::to_string(frame_len) + " samples)");

  const int frames = frame_count(buf.samples.size(), cfg.hop_samples);
  const int n_ch = static_cast<int>(grid.size());

  std::vector<std::shared_ptr<const FilterKernel>> kernels(n_ch);
  std::vector<int> periods(n_ch);
  for (int j = 0; j < n_ch; ++j) {
    periods[j] = grid.period(j);
    kernels[j] = cached_kernel(periods[j], cfg.bident, cfg.kernel);
  }

  PitchgramPair out;
  out.weighted = make_gram(grid, cfg, frames, PitchgramVariant::PowerWeighted,
                           Domain::Time);
  out.invariant = make_gram(grid, cfg, frames, PitchgramVariant::PowerInvariant,
                            Domain::Time);

  detail::parallel_for(frames, [&](int m) {
    thread_local std::vector<double> frame, filtered;
    gather_frame(buf.samples, static_cast<long>(m + 1) * cfg.hop_samples,
                 frame_len, frame);

    AcfSeries r = autocorrelation(frame, max_lag);
    const double power = r.values[0];
    const AcfSeries base = cfg.compression ? compress(r) : std::move(r);
    const double inv_norm =
        power > 0.0 ? 1.0 / (cfg.compression ? std::sqrt(power) : power) : 0.0;

    filtered.resize(frame.size());
    for (int j = 0; j < n_ch; ++j) {
      const int n0 = periods[j];
      const double score = kernel_score(base.values, *kernels[j]);

      // Harmonicity over the last period of the frame: steady state of the
      // per-frame comb, right at the grid instant.
      comb_feedback_into(frame, {cfg.comb_a, n0}, filtered);
      const double eta = harmonicity(
          std::span<const double>(filtered).last(static_cast<std::size_t>(n0)), n0);

      out.weighted.at(m, j) = (cfg.compression ? eta : eta * eta) * score;
      out.invariant.at(m, j) = score * inv_norm;
    }
  });
  return out;
}

namespace {

struct FreqPlan {
  int dft = 0;
  std::vector<double> window;
  double window_power = 0.0;           // sum of squared window samples
  std::vector<std::vector<double>> response;   // per channel, bins 0..K/2
  std::vector<std::vector<double>> comb_gain2;  // |comb response|^2 per bin
};

double nsinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

FreqPlan build_freq_plan(const PitchGrid& grid, const AnalysisConfig& cfg) {
  FreqPlan plan;
  plan.dft = cfg.dft_size;
  const int k_half = plan.dft / 2;
  const double fs = grid.sample_rate_hz;
  const double bin_hz = fs / plan.dft;
  const int span2 = 2 * cfg.bident.span_periods;

  // Resolution guard at the lowest pitch. When the full bident window fits in
  // the DFT frame the bins must separate adjacent semitones; when the frame
  // truncates the window, the response is frame-limited and the bins only
  // need to resolve the subharmonic prong at f0/2.
  {
    const double f_low = grid.frequency(0);
    const int n0_low = grid.period(0);
    const bool kernel_fits = span2 * n0_low <= plan.dft;
    const double required =
        kernel_fits ? f_low * (kSemitoneRatio - 1.0) : f_low / 2.0;
    if (bin_hz >= required)
      throw std::invalid_argument(
          "pitchgram_freq: DFT size too small to separate adjacent semitones "
          "at the lowest pitch (bin width " + std::to_string(bin_hz) +
          " Hz, need < " + std::to_string(required) + " Hz)");
  }

  plan.window.resize(plan.dft);
  for (int n = 0; n < plan.dft; ++n) {
    const double u = 2.0 * std::numbers::pi * n / (plan.dft - 1);
    plan.window[n] = cfg.window == WindowKind::Hamming
                         ? 0.54 - 0.46 * std::cos(u)
                         : 0.5 * (1.0 - std::cos(u));
  }
  for (double w : plan.window) plan.window_power += w * w;

  const int n_ch = static_cast<int>(grid.size());
  plan.response.resize(n_ch);
  plan.comb_gain2.resize(n_ch);
  for (int j = 0; j < n_ch; ++j) {
    const double f0 = grid.frequency(j);
    const int n0 = grid.period(j);
    // Length-matched sinc: every prong is matched to the DFT frame length, so
    // each channel samples the window-blurred spectrum with the same capture
    // width. Per-channel 24 N0 widths would hand higher channels more
    // bin-sampled prong area and inflate harmonic ghosts.
    (void)n0;
    const double t_eff = plan.dft / fs;
    const double alpha = cfg.bident.alpha;
    const double beta = cfg.bident.beta;

    plan.response[j].resize(k_half + 1);
    plan.comb_gain2[j].resize(k_half + 1);
    for (int k = 0; k <= k_half; ++k) {
      const double f = k * bin_hz;
      if (cfg.kernel == KernelKind::Bident) {
        plan.response[j][k] =
            alpha / 4.0 * (nsinc(t_eff * (f - f0)) - nsinc(t_eff * (f - 2.0 * f0))) -
            beta / 2.0 * nsinc(t_eff * (f - f0 / 2.0));
      } else {
        plan.response[j][k] = 0.5 * nsinc(t_eff * (f - f0));
      }
      const double phase = 2.0 * std::numbers::pi * f * n0 / fs;
      plan.comb_gain2[j][k] =
          1.0 / (1.0 - 2.0 * cfg.comb_a * std::cos(phase) + cfg.comb_a * cfg.comb_a);
    }
  }
  return plan;
}

}  // namespace

PitchgramPair analyze_freq(const AudioBuffer& buf, const PitchGrid& grid,
                           const AnalysisConfig& cfg) {
  buf.validate();
  grid.validate();
  cfg.validate();
  if (buf.sample_rate_hz != grid.sample_rate_hz)
    throw std::invalid_argument("pitchgram_freq: buffer/grid sample rate mismatch");
  if (buf.samples.size() < static_cast<std::size_t>(cfg.dft_size))
    throw std::invalid_argument("pitchgram_freq: buffer shorter than one DFT frame");

  const FreqPlan plan = build_freq_plan(grid, cfg);
  const int frames = frame_count(buf.samples.size(), cfg.hop_samples);
  const int n_ch = static_cast<int>(grid.size());
  const int k_half = plan.dft / 2;
  const double fs = grid.sample_rate_hz;
  const double bin_hz = fs / plan.dft;
  const double u2 = plan.window_power;
  // Magnitude (compressed) or power (plain) of the spectral density estimate.
  const double mag_norm = 1.0 / std::sqrt(fs * u2);
  const double pow_norm = 1.0 / (fs * u2);

  PitchgramPair out;
  out.weighted = make_gram(grid, cfg, frames, PitchgramVariant::PowerWeighted,
                           Domain::Frequency);
  out.invariant = make_gram(grid, cfg, frames, PitchgramVariant::PowerInvariant,
                            Domain::Frequency);

  detail::parallel_for(frames, [&](int m) {
    thread_local std::vector<double> frame;
    thread_local std::vector<std::complex<double>> spectrum;
    thread_local std::vector<double> mag, pwr;

    // The window is centered on the grid instant: the tapered analysis
    // window "sees" content at its middle, so an end-anchored label would
    // report every transition half a window late.
    gather_frame(buf.samples,
                 static_cast<long>(m + 1) * cfg.hop_samples + plan.dft / 2,
                 plan.dft, frame);
    spectrum.resize(plan.dft);
    for (int n = 0; n < plan.dft; ++n)
      spectrum[n] = {frame[n] * plan.window[n], 0.0};
    detail::fft_inplace(spectrum);

    mag.resize(k_half + 1);
    pwr.resize(k_half + 1);
    double total_power = 0.0;  // sum |X(k)|^2 over the full spectrum
    for (int k = 0; k <= k_half; ++k) {
      pwr[k] = std::norm(spectrum[k]);
      mag[k] = std::sqrt(pwr[k]);
      total_power += (k == 0 || k == k_half) ? pwr[k] : 2.0 * pwr[k];
    }
    const double mean_power = total_power / (plan.dft * u2);

    for (int j = 0; j < n_ch; ++j) {
      const std::vector<double>& w = plan.response[j];
      const std::vector<double>& c2 = plan.comb_gain2[j];

      double inner = 0.5 * (w[0] * (cfg.compression ? mag[0] : pwr[0]) +
                            w[k_half] * (cfg.compression ? mag[k_half] : pwr[k_half]));
      double comb_power = c2[0] * pwr[0] + c2[k_half] * pwr[k_half];
      if (cfg.compression) {
        for (int k = 1; k < k_half; ++k) {
          inner += w[k] * mag[k];
          comb_power += 2.0 * c2[k] * pwr[k];
        }
      } else {
        for (int k = 1; k < k_half; ++k) {
          inner += w[k] * pwr[k];
          comb_power += 2.0 * c2[k] * pwr[k];
        }
      }
      const double base =
          2.0 * bin_hz * inner * (cfg.compression ? mag_norm : pow_norm);
      // Spectral stand-in for the time-domain harmonicity coefficient.
      const double eta = std::sqrt(comb_power / (plan.dft * u2));

      out.weighted.at(m, j) =
          kFreqWeightedAlign * (cfg.compression ? eta : eta * eta) * base;
      out.invariant.at(m, j) =
          mean_power > 0.0
              ? kFreqInvariantAlign * base /
                    (cfg.compression ? std::sqrt(mean_power) : mean_power)
              : 0.0;
    }
  });
  return out;
}

Pitchgram pitchgram_time(const AudioBuffer& buf, const PitchGrid& grid,
                         const AnalysisConfig& cfg, PitchgramVariant variant) {
  PitchgramPair pair = analyze_time(buf, grid, cfg);
  return variant == PitchgramVariant::PowerWeighted ? std::move(pair.weighted)
                                                    : std::move(pair.invariant);
}

Pitchgram pitchgram_freq(const AudioBuffer& buf, const PitchGrid& grid,
                         const AnalysisConfig& cfg, PitchgramVariant variant) {
  PitchgramPair pair = analyze_freq(buf, grid, cfg);
  return variant == PitchgramVariant::PowerWeighted ? std::move(pair.weighted)
                                                    : std::move(pair.invariant);
}

Chromagram chromagram(const Pitchgram& pg) {
  if (pg.pitches.empty() || pg.pitches.back() - pg.pitches.front() < 12)
    throw std::invalid_argument("chromagram: grid must span at least one octave");
  Chromagram z;
  z.frames = pg.frames;
  z.hop_samples = pg.hop_samples;
  z.sample_rate_hz = pg.sample_rate_hz;
  z.scores.assign(static_cast<std::size_t>(pg.frames) * 12, 0.0);
  for (int m = 0; m < pg.frames; ++m)
    for (int j = 0; j < pg.n_pitches(); ++j)
      z.at(m, pg.pitches[j] % 12) += pg.at(m, j);
  return z;
}

Pitchgram posterior_pitchgram(const Pitchgram& weighted, const Pitchgram& invariant) {
  if (weighted.frames != invariant.frames ||
      weighted.pitches != invariant.pitches ||
      weighted.hop_samples != invariant.hop_samples)
    throw std::invalid_argument("posterior_pitchgram: shape or grid mismatch");

  Pitchgram out = weighted;
  out.variant = PitchgramVariant::PowerWeighted;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < out.scores.size(); ++i) {
    out.scores[i] = weighted.scores[i] * invariant.scores[i];
    norm2 += out.scores[i] * out.scores[i];
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : out.scores) v *= inv;
  }
  return out;
}

}  // namespace pitchgram
