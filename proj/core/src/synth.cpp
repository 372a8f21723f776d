#include "pitchgram/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pitchgram/grid.hpp"

namespace pitchgram {

SynthResult synthesize(const std::vector<ToneSpec>& specs, int sample_rate_hz,
                       double total_s, double frame_period_s,
                       double tuning_hz) {
  if (sample_rate_hz <= 0)
    throw std::invalid_argument("synthesize: sample rate must be positive");
  if (total_s <= 0.0)
    throw std::invalid_argument("synthesize: total duration must be positive");

  const double fs = sample_rate_hz;
  const std::size_t n_total = static_cast<std::size_t>(std::llround(total_s * fs));

  SynthResult out;
  out.audio.sample_rate_hz = sample_rate_hz;
  out.audio.samples.assign(n_total, 0.0);

  for (const ToneSpec& t : specs) {
    if (t.partial_count < 1)
      throw std::invalid_argument("synthesize: partial_count must be >= 1");
    if (t.partial_decay_ratio <= 0.0 || t.partial_decay_ratio > 1.0)
      throw std::invalid_argument("synthesize: partial_decay_ratio outside (0, 1]");
    const double f0 = midi_to_frequency(t.pitch, tuning_hz);
    const double vib_peak = std::pow(2.0, std::abs(t.vibrato_extent_cents) / 1200.0);
    if (t.partial_count * f0 * vib_peak >= fs / 2.0)
      throw std::invalid_argument(
          "synthesize: aliasing, partial " + std::to_string(t.partial_count) +
          " of pitch " + std::to_string(t.pitch) + " crosses Nyquist");

    const std::size_t begin =
        std::min(n_total, static_cast<std::size_t>(std::llround(t.onset_s * fs)));
    const std::size_t end = std::min(
        n_total, static_cast<std::size_t>(std::llround((t.onset_s + t.duration_s) * fs)));

    // Fundamental phase advanced sample by sample so vibrato stays coherent
    // across partials (partial k runs at k times the instantaneous frequency).
    double phase = 0.0;
    for (std::size_t n = begin; n < end; ++n) {
      const double tt = (n - begin) / fs;
      double f_inst = f0;
      if (t.vibrato_extent_cents != 0.0 && t.vibrato_rate_hz > 0.0) {
        const double cents = t.vibrato_extent_cents *
                             std::sin(2.0 * std::numbers::pi * t.vibrato_rate_hz * tt);
        f_inst = f0 * std::pow(2.0, cents / 1200.0);
      }
      double env = t.amplitude * std::exp(-t.amplitude_envelope * tt);
      if (t.attack_s > 0.0 && tt < t.attack_s) env *= tt / t.attack_s;
      double s = 0.0;
      double partial_amp = 1.0;
      for (int k = 1; k <= t.partial_count; ++k) {
        s += partial_amp * std::sin(k * phase);
        partial_amp *= t.partial_decay_ratio;
      }
      out.audio.samples[n] += env * s;
      phase += 2.0 * std::numbers::pi * f_inst / fs;
    }

    NoteEvent ev;
    ev.pitch = t.pitch;
    ev.onset_frame = static_cast<int>(std::lround(t.onset_s / frame_period_s));
    ev.offset_frame =
        static_cast<int>(std::lround((t.onset_s + t.duration_s) / frame_period_s));
    if (ev.offset_frame <= ev.onset_frame) ev.offset_frame = ev.onset_frame + 1;
    ev.velocity = std::clamp(static_cast<int>(std::lround(t.amplitude * 127.0)), 1, 127);
    out.notes.push_back(ev);
  }

  std::sort(out.notes.begin(), out.notes.end(),
            [](const NoteEvent& a, const NoteEvent& b) {
              return std::tie(a.onset_frame, a.pitch) <
                     std::tie(b.onset_frame, b.pitch);
            });
  return out;
}

namespace {

void apply_key(ToneSpec& t, const std::string& key, const std::string& value,
               int line_no) {
  auto bad = [&](const char* what) {
    throw std::runtime_error("tone spec line " + std::to_string(line_no) + ": " +
                             what + " '" + value + "' for key '" + key + "'");
  };
  double num = 0.0;
  try {
    num = std::stod(value);
  } catch (...) {
    bad("invalid number");
  }
  if (key == "pitch") t.pitch = static_cast<int>(std::lround(num));
  else if (key == "onset_s") t.onset_s = num;
  else if (key == "duration_s") t.duration_s = num;
  else if (key == "attack_s") t.attack_s = num;
  else if (key == "partial_count") t.partial_count = static_cast<int>(std::lround(num));
  else if (key == "partial_decay_ratio") t.partial_decay_ratio = num;
  else if (key == "amplitude") t.amplitude = num;
  else if (key == "amplitude_envelope") t.amplitude_envelope = num;
  else if (key == "vibrato_extent_cents") t.vibrato_extent_cents = num;
  else if (key == "vibrato_rate_hz") t.vibrato_rate_hz = num;
  else
    throw std::runtime_error("tone spec line " + std::to_string(line_no) +
                             ": unknown key '" + key + "'");
}

}  // namespace

std::vector<ToneSpec> parse_tone_specs(const std::string& text) {
  std::vector<ToneSpec> specs;
  ToneSpec current;
  bool in_stanza = false;
  int line_no = 0;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      if (in_stanza) {
        specs.push_back(current);
        current = ToneSpec{};
        in_stanza = false;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("tone spec line " + std::to_string(line_no) +
                               ": expected key = value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    apply_key(current, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no);
    in_stanza = true;
  }
  if (in_stanza) specs.push_back(current);
  if (specs.empty()) throw std::runtime_error("tone spec file defines no tones");
  return specs;
}

std::vector<ToneSpec> load_tone_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tone spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tone_specs(buf.str());
}

}  // namespace pitchgram
