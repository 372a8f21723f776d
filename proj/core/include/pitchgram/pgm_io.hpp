#pragma once

#include <string>

#include "pitchgram/pitchgram.hpp"

namespace pitchgram {

/// Binary pitchgram container: 32-byte little-endian header (magic "PGRM",
/// version, rows, cols, hop, sample rate, variant/domain/kind flags, first
/// pitch, tuning) followed by row-major float32 scores. Requires a
/// contiguous pitch grid.
void write_pgm(const Pitchgram& pg, const std::string& path);
Pitchgram read_pgm(const std::string& path);

/// Text dump for external plotting: one frame per row, comma separated.
void write_pgm_csv(const Pitchgram& pg, const std::string& path);

}  // namespace pitchgram
