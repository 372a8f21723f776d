#include "pitchgram/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace pitchgram {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  const auto b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::runtime_error("config: invalid value '" + value + "' for key '" +
                           key + "'");
}

double to_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return v;
  } catch (const std::runtime_error&) {
    throw;
  } catch (...) {
    bad_value(key, value);
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_number(key, value);
  if (v != std::floor(v)) bad_value(key, value);
  return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  bad_value(key, value);
}

void apply(ToolConfig& cfg, const std::string& section, const std::string& key,
           const std::string& value) {
  AnalysisConfig& a = cfg.analysis;
  TranscriberConfig& t = cfg.transcriber;
  const std::string full = section.empty() ? key : section + "." + key;

  if (section == "analysis" || section.empty()) {
    if (key == "comb_a") { a.comb_a = to_number(full, value); return; }
    if (key == "alpha") { a.bident.alpha = to_number(full, value); return; }
    if (key == "beta") { a.bident.beta = to_number(full, value); return; }
    if (key == "span_periods") { a.bident.span_periods = to_int(full, value); return; }
    if (key == "kernel") {
      if (value == "bident") a.kernel = KernelKind::Bident;
      else if (value == "sinc") a.kernel = KernelKind::Sinc;
      else bad_value(full, value);
      return;
    }
    if (key == "compression") { a.compression = to_bool(full, value); return; }
    if (key == "hop") { a.hop_samples = to_int(full, value); return; }
    if (key == "dft_size") { a.dft_size = to_int(full, value); return; }
    if (key == "window") {
      if (value == "hamming") a.window = WindowKind::Hamming;
      else if (value == "hann") a.window = WindowKind::Hann;
      else bad_value(full, value);
      return;
    }
    if (key == "pitch_low") { a.pitch_low = to_int(full, value); return; }
    if (key == "pitch_high") { a.pitch_high = to_int(full, value); return; }
    if (key == "tuning_hz") { a.tuning_hz = to_number(full, value); return; }
    if (key == "normalize_dbfs") { a.normalize_dbfs = to_number(full, value); return; }
    if (key == "domain") {
      if (value == "time") cfg.domain = Domain::Time;
      else if (value == "freq") cfg.domain = Domain::Frequency;
      else bad_value(full, value);
      return;
    }
    if (key == "variant") {
      if (value == "weighted") cfg.variant = PitchgramVariant::PowerWeighted;
      else if (value == "invariant") cfg.variant = PitchgramVariant::PowerInvariant;
      else bad_value(full, value);
      return;
    }
  }
  if (section == "transcriber" || section.empty()) {
    if (key == "eps1") { t.eps1 = to_number(full, value); return; }
    if (key == "eps2") { t.eps2 = to_number(full, value); return; }
    if (key == "eps3") { t.eps3 = to_number(full, value); return; }
    if (key == "eps4") { t.eps4 = to_number(full, value); return; }
    if (key == "d_min") { t.d_min = to_int(full, value); return; }
    if (key == "smoother") {
      if (value == "moving-average") t.smoother = SmootherKind::MovingAverage;
      else if (value == "median") t.smoother = SmootherKind::Median;
      else bad_value(full, value);
      return;
    }
    if (key == "smoother_len") { t.smoother_len = to_int(full, value); return; }
    if (key == "velocity_scale") { t.velocity_scale = to_number(full, value); return; }
    if (key == "velocity_offset") { t.velocity_offset = to_number(full, value); return; }
    if (key == "velocity_auto") { t.velocity_auto = to_bool(full, value); return; }
    if (key == "velocity_mode") {
      if (value == "onset") t.velocity_mode = VelocityMode::Onset;
      else if (value == "integral") t.velocity_mode = VelocityMode::Integral;
      else bad_value(full, value);
      return;
    }
    if (key == "transient_gate") { t.transient_gate = to_bool(full, value); return; }
    if (key == "octave_rule") { t.octave_rule = to_bool(full, value); return; }
    if (key == "rising_slope") { t.rising_slope = to_bool(full, value); return; }
  }
  throw std::runtime_error("config: unknown key '" + full + "'");
}

}  // namespace

ToolConfig parse_config(const std::string& text) {
  ToolConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section != "analysis" && section != "transcriber")
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": unknown section '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    apply(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ToolConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string default_config_text() {
  return R"(# pitchgram default configuration
# Values marked (ours) are calibration choices of this implementation;
# everything else follows the published analysis design.

[analysis]
comb_a = 0.8              # feed-backward comb scaling factor
alpha = 2                 # bident spike weight: equal prongs with beta = 1
beta = 1
kernel = bident           # bident | sinc
compression = on          # signed square root of the ACF
hop = 1024                # 23.2 ms at 44.1 kHz
dft_size = 4096           # frequency-domain variant
window = hamming          # hamming | hann
pitch_low = 40            # guitar E2
pitch_high = 88           # guitar E6
tuning_hz = 440
normalize_dbfs = -20      # reference input level (ours)
domain = freq             # time | freq
variant = weighted        # weighted | invariant

[transcriber]
eps1 = 0.16               # onset score threshold (ours, fixture-calibrated)
eps2 = 0.35               # onset slope threshold (ours)
eps3 = 0.05               # decay score threshold (ours)
eps4 = -0.10              # decay slope threshold (ours)
d_min = 3                 # minimum duration, frames (ours)
smoother = moving-average # moving-average | median
smoother_len = 5
velocity_scale = 2500     # score-to-velocity gain (ours)
velocity_offset = 0
velocity_auto = off       # rescale the take so the loudest onset hits 127
velocity_mode = onset     # onset | integral
transient_gate = on       # marginal-slope re-onsets (tremolo)
octave_rule = on          # suppress onsets one octave above an active note
rising_slope = off
)";
}

}  // namespace pitchgram
