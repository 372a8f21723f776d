#pragma once

#include <string>

#include "pitchgram/signal.hpp"

namespace pitchgram {

enum class SampleFormat { Pcm16, Pcm24, Float32 };

/// Reads a RIFF/WAVE file. Accepts PCM 16/24-bit and IEEE float 32-bit,
/// 1 or 2 channels. Stereo is downmixed by channel mean, integer samples
/// are scaled to +-1.0 full scale.
AudioBuffer load_wav(const std::string& path);

/// Writes a mono WAV file. Values outside +-1.0 are clipped.
void save_wav(const AudioBuffer& buf, const std::string& path,
              SampleFormat format = SampleFormat::Pcm16);

}  // namespace pitchgram
