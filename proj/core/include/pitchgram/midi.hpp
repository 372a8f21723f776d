#pragma once

#include <string>
#include <vector>

#include "pitchgram/signal.hpp"

namespace pitchgram {

/// Writes a format-0 standard MIDI file with one note-on/note-off pair per
/// event. Frame indices are converted to seconds via frame_period_s; the file
/// carries a fixed 120 BPM tempo at 480 ticks per quarter, so tick positions
/// encode absolute time. Notes must not overlap within a pitch.
void export_midi(const std::vector<NoteEvent>& notes, double frame_period_s,
                 const std::string& path);

/// Reads a format-0 or format-1 standard MIDI file and pairs note-on/note-off
/// events FIFO per pitch. Tempo changes are honored when converting ticks to
/// seconds; the resulting times are quantized onto a frame grid of
/// frame_period_s. Throws on malformed files and unmatched note-ons.
std::vector<NoteEvent> import_midi(const std::string& path,
                                   double frame_period_s);

}  // namespace pitchgram
