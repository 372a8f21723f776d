#include "pitchgram/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace pitchgram {

namespace {

uint32_t read_u32le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32le(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16le(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

[[noreturn]] void unreadable(const std::string& path, const char* why) {
  throw std::runtime_error("unreadable file '" + path + "': " + why);
}

}  // namespace

AudioBuffer load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) unreadable(path, "cannot open");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12) unreadable(path, "truncated header");
  if (std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    unreadable(path, "not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_size = 0;
  bool have_fmt = false;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* hdr = data.data() + pos;
    const uint32_t chunk_size = read_u32le(hdr + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > data.size()) unreadable(path, "truncated chunk");
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) unreadable(path, "short fmt chunk");
      format = read_u16le(data.data() + body);
      channels = read_u16le(data.data() + body + 2);
      sample_rate = read_u32le(data.data() + body + 4);
      bits = read_u16le(data.data() + body + 14);
      if (format == 0xfffe) {
        // WAVE_FORMAT_EXTENSIBLE: actual format is the first word of the GUID
        if (chunk_size < 40) unreadable(path, "short extensible fmt chunk");
        format = read_u16le(data.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      pcm = data.data() + body;
      pcm_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || pcm == nullptr) unreadable(path, "missing fmt or data chunk");
  if (channels < 1 || channels > 2)
    throw std::runtime_error("unsupported encoding in '" + path + "': " +
                             std::to_string(channels) + " channels");
  if (sample_rate == 0) unreadable(path, "zero sample rate");

  const bool is_float = format == 3;
  if (!(format == 1 && (bits == 16 || bits == 24)) && !(is_float && bits == 32))
    throw std::runtime_error("unsupported encoding in '" + path +
                             "': format tag " + std::to_string(format) + ", " +
                             std::to_string(bits) + " bits");

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t stride = bytes_per_sample * channels;
  const std::size_t n_frames = pcm_size / stride;
  if (n_frames == 0) throw std::runtime_error("zero-length audio in '" + path + "'");

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int>(sample_rate);
  buf.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (unsigned ch = 0; ch < channels; ++ch) {
      const unsigned char* s = pcm + i * stride + ch * bytes_per_sample;
      double v = 0.0;
      if (is_float) {
        float f;
        std::memcpy(&f, s, 4);
        v = f;
      } else if (bits == 16) {
        v = static_cast<int16_t>(s[0] | (s[1] << 8)) / 32768.0;
      } else {  // 24-bit: sign-extend
        int32_t raw = s[0] | (s[1] << 8) | (s[2] << 16);
        if (raw & 0x800000) raw |= ~0xffffff;
        v = raw / 8388608.0;
      }
      acc += v;
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

void save_wav(const AudioBuffer& buf, const std::string& path,
              SampleFormat format) {
  buf.validate();
  const uint16_t bits = format == SampleFormat::Pcm16 ? 16
                        : format == SampleFormat::Pcm24 ? 24 : 32;
  const uint16_t fmt_tag = format == SampleFormat::Float32 ? 3 : 1;
  const uint32_t n = static_cast<uint32_t>(buf.samples.size());
  const uint32_t data_bytes = n * (bits / 8);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32le(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32le(out, 16);
  put_u16le(out, fmt_tag);
  put_u16le(out, 1);  // mono
  put_u32le(out, static_cast<uint32_t>(buf.sample_rate_hz));
  put_u32le(out, static_cast<uint32_t>(buf.sample_rate_hz) * (bits / 8));
  put_u16le(out, bits / 8);
  put_u16le(out, bits);
  out += "data";
  put_u32le(out, data_bytes);

  for (double s : buf.samples) {
    if (format == SampleFormat::Float32) {
      float f = static_cast<float>(s);
      char b[4];
      std::memcpy(b, &f, 4);
      out.append(b, 4);
    } else if (format == SampleFormat::Pcm16) {
      long v = std::lround(s * 32768.0);
      v = std::clamp(v, -32768L, 32767L);
      put_u16le(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
    } else {
      long v = std::lround(s * 8388608.0);
      v = std::clamp(v, -8388608L, 8388607L);
      out.push_back(static_cast<char>(v & 0xff));
      out.push_back(static_cast<char>((v >> 8) & 0xff));
      out.push_back(static_cast<char>((v >> 16) & 0xff));
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace pitchgram
