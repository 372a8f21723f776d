// pgram: pitch-synchronous filter-bank analysis, transcription and scoring
// of tonal recordings. Subcommands: pitchgram, transcribe, eval, synth.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pitchgram/config.hpp"
#include "pitchgram/eval.hpp"
#include "pitchgram/midi.hpp"
#include "pitchgram/pgm_io.hpp"
#include "pitchgram/pitchgram.hpp"
#include "pitchgram/synth.hpp"
#include "pitchgram/transcriber.hpp"
#include "pitchgram/wav.hpp"

namespace {

using namespace pitchgram;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> domain, variant, kernel;
  std::optional<int> hop, dft_size;
  std::optional<std::string> pitch_range;
  std::optional<double> tuning;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Configuration file (key = value)");
  cmd->add_option("--domain", f.domain, "Analysis domain: time | freq");
  cmd->add_option("--variant", f.variant, "Pitchgram variant: weighted | invariant");
  cmd->add_option("--kernel", f.kernel, "Analysis kernel: bident | sinc");
  cmd->add_option("--hop", f.hop, "Analysis hop in samples");
  cmd->add_option("--dft-size", f.dft_size, "DFT size for the freq domain");
  cmd->add_option("--pitch-range", f.pitch_range, "MIDI pitch range, e.g. 40:88");
  cmd->add_option("--tuning", f.tuning, "A4 reference frequency in Hz");
}

ToolConfig resolve_config(const CommonFlags& f) {
  ToolConfig cfg = f.config_path.empty() ? parse_config(default_config_text())
                                         : load_config(f.config_path);
  if (f.domain) {
    if (*f.domain == "time") cfg.domain = Domain::Time;
    else if (*f.domain == "freq") cfg.domain = Domain::Frequency;
    else throw std::runtime_error("invalid --domain '" + *f.domain + "'");
  }
  if (f.variant) {
    if (*f.variant == "weighted") cfg.variant = PitchgramVariant::PowerWeighted;
    else if (*f.variant == "invariant") cfg.variant = PitchgramVariant::PowerInvariant;
    else throw std::runtime_error("invalid --variant '" + *f.variant + "'");
  }
  if (f.kernel) {
    if (*f.kernel == "bident") cfg.analysis.kernel = KernelKind::Bident;
    else if (*f.kernel == "sinc") cfg.analysis.kernel = KernelKind::Sinc;
    else throw std::runtime_error("invalid --kernel '" + *f.kernel + "'");
  }
  if (f.hop) cfg.analysis.hop_samples = *f.hop;
  if (f.dft_size) cfg.analysis.dft_size = *f.dft_size;
  if (f.pitch_range) {
    const auto colon = f.pitch_range->find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("invalid --pitch-range '" + *f.pitch_range +
                               "', expected low:high");
    cfg.analysis.pitch_low = std::stoi(f.pitch_range->substr(0, colon));
    cfg.analysis.pitch_high = std::stoi(f.pitch_range->substr(colon + 1));
  }
  if (f.tuning) cfg.analysis.tuning_hz = *f.tuning;
  cfg.validate();
  return cfg;
}

/// Grid steps come either as plain seconds ("0.05s") or as a note fraction
/// at a tempo ("120bpm:1/32").
double parse_grid_step(const std::string& text) {
  if (text.empty()) throw std::runtime_error("empty --grid value");
  if (text.back() == 's' && text.find("bpm") == std::string::npos)
    return std::stod(text.substr(0, text.size() - 1));
  const auto bpm_at = text.find("bpm:");
  if (bpm_at == std::string::npos)
    throw std::runtime_error("invalid --grid '" + text +
                             "', expected e.g. 0.05s or 120bpm:1/32");
  const double bpm = std::stod(text.substr(0, bpm_at));
  const std::string frac = text.substr(bpm_at + 4);
  const auto slash = frac.find('/');
  if (slash == std::string::npos || bpm <= 0.0)
    throw std::runtime_error("invalid --grid '" + text + "'");
  const double num = std::stod(frac.substr(0, slash));
  const double den = std::stod(frac.substr(slash + 1));
  if (num <= 0.0 || den <= 0.0)
    throw std::runtime_error("invalid --grid '" + text + "'");
  const double quarter_s = 60.0 / bpm;
  return quarter_s * 4.0 * num / den;
}

PitchgramPair run_analysis(const AudioBuffer& buf, const ToolConfig& cfg) {
  const PitchGrid grid = cfg.analysis.grid(buf.sample_rate_hz);
  return cfg.domain == Domain::Time ? analyze_time(buf, grid, cfg.analysis)
                                    : analyze_freq(buf, grid, cfg.analysis);
}

int cmd_pitchgram(const std::string& in_path, const std::string& out_path,
                  const std::string& csv_path, const CommonFlags& flags,
                  bool timing) {
  const ToolConfig cfg = resolve_config(flags);
  const AudioBuffer audio = load_wav(in_path);

  const auto t0 = Clock::now();
  PitchgramPair pair = run_analysis(audio, cfg);
  const double elapsed = seconds_since(t0);

  const Pitchgram& pg = cfg.variant == PitchgramVariant::PowerWeighted
                            ? pair.weighted
                            : pair.invariant;
  write_pgm(pg, out_path);
  if (!csv_path.empty()) write_pgm_csv(pg, csv_path);
  if (timing)
    std::printf("pitchgram: %.3f s for %.3f s audio, real-time factor %.3f\n",
                elapsed, audio.duration_s(), elapsed / audio.duration_s());
  return 0;
}

int cmd_transcribe(const std::string& in_path, const std::string& out_path,
                   const std::string& csv_path, const CommonFlags& flags,
                   bool timing) {
  const ToolConfig cfg = resolve_config(flags);
  AudioBuffer audio = load_wav(in_path);

  const auto t_norm = Clock::now();
  audio = normalize_rms(audio, cfg.analysis.normalize_dbfs);
  const double norm_s = seconds_since(t_norm);

  const auto t_gram = Clock::now();
  PitchgramPair pair = run_analysis(audio, cfg);
  const double gram_s = seconds_since(t_gram);

  const auto t_notes = Clock::now();
  const std::vector<NoteEvent> notes =
      transcribe(pair.weighted, pair.invariant, cfg.transcriber);
  const double notes_s = seconds_since(t_notes);

  const double period = pair.weighted.frame_period_s();
  export_midi(notes, period, out_path);
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open '" + csv_path + "'");
    csv << "onset_s,offset_s,pitch,velocity\n";
    for (const NoteEvent& n : notes)
      csv << n.onset_frame * period << ',' << n.offset_frame * period << ','
          << n.pitch << ',' << n.velocity << '\n';
  }
  std::printf("%zu notes -> %s\n", notes.size(), out_path.c_str());
  if (timing) {
    const double total = norm_s + gram_s + notes_s;
    std::printf("normalize:  %8.3f s\n", norm_s);
    std::printf("pitchgram:  %8.3f s\n", gram_s);
    std::printf("transcribe: %8.3f s\n", notes_s);
    std::printf("total:      %8.3f s for %.3f s audio, real-time factor %.3f\n",
                total, audio.duration_s(), total / audio.duration_s());
  }
  return 0;
}

int cmd_eval(const std::string& det_path, const std::string& ref_path,
             const std::string& grid_text, const std::string& pitch_range,
             bool velocity_weighted, int transitions_window,
             const std::string& csv_path) {
  const double step = parse_grid_step(grid_text);
  // Import on a fine grid so mask quantization, not MIDI quantization,
  // decides cell membership.
  const double import_period = 1e-3;
  const std::vector<NoteEvent> det = import_midi(det_path, import_period);
  const std::vector<NoteEvent> ref = import_midi(ref_path, import_period);

  int lo = 0, hi = 127;
  if (!pitch_range.empty()) {
    const auto colon = pitch_range.find(':');
    if (colon == std::string::npos)
      throw std::runtime_error("invalid --pitch-range, expected low:high");
    lo = std::stoi(pitch_range.substr(0, colon));
    hi = std::stoi(pitch_range.substr(colon + 1));
  }
  double total_s = step;
  for (const NoteEvent& n : det)
    total_s = std::max(total_s, n.offset_frame * import_period);
  for (const NoteEvent& n : ref)
    total_s = std::max(total_s, n.offset_frame * import_period);

  const BinaryMask det_mask =
      notes_to_mask(det, import_period, step, lo, hi, total_s, velocity_weighted);
  const BinaryMask ref_mask =
      notes_to_mask(ref, import_period, step, lo, hi, total_s, false);
  const EvalReport report = evaluate(det_mask, ref_mask, velocity_weighted);
  std::cout << report.to_kv_text();

  if (transitions_window > 0) {
    const TransitionCounts tc =
        transition_decomposition(det_mask, ref_mask, transitions_window);
    std::cout << "onset_substitutions = " << tc.onset_substitutions << '\n'
              << "onset_deletions = " << tc.onset_deletions << '\n'
              << "onset_insertions = " << tc.onset_insertions << '\n'
              << "decay_substitutions = " << tc.decay_substitutions << '\n'
              << "decay_deletions = " << tc.decay_deletions << '\n'
              << "decay_insertions = " << tc.decay_insertions << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open '" + csv_path + "'");
    csv << EvalReport::csv_header() << '\n'
        << report.to_csv_row(det_path) << '\n';
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& wav_path,
              const std::string& midi_path, int sample_rate, double pad_s,
              const CommonFlags& flags) {
  const ToolConfig cfg = resolve_config(flags);
  const std::vector<ToneSpec> specs = load_tone_specs(spec_path);
  double total_s = 0.0;
  for (const ToneSpec& t : specs)
    total_s = std::max(total_s, t.onset_s + t.duration_s);
  total_s += pad_s;

  const double period =
      static_cast<double>(cfg.analysis.hop_samples) / sample_rate;
  SynthResult result =
      synthesize(specs, sample_rate, total_s, period, cfg.analysis.tuning_hz);

  // Leave headroom: scale to 0.9 full scale when the mix clips.
  double peak = 0.0;
  for (double s : result.audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.9) {
    const double gain = 0.9 / peak;
    for (double& s : result.audio.samples) s *= gain;
  }
  save_wav(result.audio, wav_path);
  if (!midi_path.empty()) export_midi(result.notes, period, midi_path);
  std::printf("%zu tones, %.3f s -> %s\n", specs.size(), total_s,
              wav_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitch-synchronous filter-bank analysis and transcription"};
  app.require_subcommand(1);

  // pitchgram
  auto* pg_cmd = app.add_subcommand("pitchgram", "Analyze a WAV into a pitchgram");
  std::string pg_in, pg_out = "out.pgm", pg_csv;
  bool pg_timing = false;
  CommonFlags pg_flags;
  pg_cmd->add_option("input", pg_in, "Input WAV file")->required();
  pg_cmd->add_option("-o,--output", pg_out, "Output PGRM container");
  pg_cmd->add_option("--csv", pg_csv, "Also dump the matrix as CSV");
  pg_cmd->add_flag("--timing", pg_timing, "Print wall time and real-time factor");
  add_common_flags(pg_cmd, pg_flags);

  // transcribe
  auto* tr_cmd = app.add_subcommand("transcribe", "Transcribe a WAV into MIDI");
  std::string tr_in, tr_out = "out.mid", tr_csv;
  bool tr_timing = false;
  CommonFlags tr_flags;
  tr_cmd->add_option("input", tr_in, "Input WAV file")->required();
  tr_cmd->add_option("-o,--output", tr_out, "Output MIDI file");
  tr_cmd->add_option("--notes-csv", tr_csv, "Also dump note events as CSV");
  tr_cmd->add_flag("--timing", tr_timing, "Print per-stage wall time");
  add_common_flags(tr_cmd, tr_flags);

  // eval
  auto* ev_cmd = app.add_subcommand("eval", "Score a transcription against a reference");
  std::string ev_det, ev_ref, ev_grid = "0.0232s", ev_range, ev_csv;
  bool ev_vel = false;
  int ev_transitions = 0;
  ev_cmd->add_option("detected", ev_det, "Transcription MIDI file")->required();
  ev_cmd->add_option("reference", ev_ref, "Reference MIDI file")->required();
  ev_cmd->add_option("--grid", ev_grid, "Grid step: seconds (0.05s) or 120bpm:1/32");
  ev_cmd->add_option("--pitch-range", ev_range, "Mask pitch range, e.g. 40:88");
  ev_cmd->add_flag("--velocity-weighted", ev_vel, "Velocity-weighted precision");
  ev_cmd->add_option("--transitions", ev_transitions,
                     "Also report S/D/I within +-N frames of note transitions");
  ev_cmd->add_option("--csv", ev_csv, "Write the report as CSV");

  // synth
  auto* sy_cmd = app.add_subcommand("synth", "Render a tone-spec fixture to WAV");
  std::string sy_spec, sy_out = "out.wav", sy_midi;
  int sy_rate = 44100;
  double sy_pad = 0.5;
  CommonFlags sy_flags;
  sy_cmd->add_option("spec", sy_spec, "Tone spec file")->required();
  sy_cmd->add_option("-o,--output", sy_out, "Output WAV file");
  sy_cmd->add_option("--midi", sy_midi, "Also write the reference MIDI");
  sy_cmd->add_option("--sample-rate", sy_rate, "Sample rate in Hz");
  sy_cmd->add_option("--pad", sy_pad, "Trailing silence in seconds");
  add_common_flags(sy_cmd, sy_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (pg_cmd->parsed())
      return cmd_pitchgram(pg_in, pg_out, pg_csv, pg_flags, pg_timing);
    if (tr_cmd->parsed())
      return cmd_transcribe(tr_in, tr_out, tr_csv, tr_flags, tr_timing);
    if (ev_cmd->parsed())
      return cmd_eval(ev_det, ev_ref, ev_grid, ev_range, ev_vel, ev_transitions,
                      ev_csv);
    if (sy_cmd->parsed())
      return cmd_synth(sy_spec, sy_out, sy_midi, sy_rate, sy_pad, sy_flags);
  } catch (const std::exception& e) {
    std::cerr << "pgram: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
