#include "pitchgram/pgm_io.hpp"

#include <cstring>
#include <fstream>

namespace pitchgram {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'R', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_f32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

float get_f32(const unsigned char* p) {
  const uint32_t bits = get_u32(p);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

void write_pgm(const Pitchgram& pg, const std::string& path) {
  for (std::size_t j = 1; j < pg.pitches.size(); ++j)
    if (pg.pitches[j] != pg.pitches[j - 1] + 1)
      throw std::invalid_argument("write_pgm: pitch grid must be contiguous");
  if (pg.pitches.empty())
    throw std::invalid_argument("write_pgm: empty pitch grid");

  std::string out;
  out.reserve(32 + pg.scores.size() * 4);
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(pg.frames));
  put_u32(out, static_cast<uint32_t>(pg.pitches.size()));
  put_u32(out, static_cast<uint32_t>(pg.hop_samples));
  put_u32(out, static_cast<uint32_t>(pg.sample_rate_hz));
  out.push_back(static_cast<char>(pg.variant == PitchgramVariant::PowerInvariant));
  out.push_back(static_cast<char>(pg.domain == Domain::Frequency));
  out.push_back(static_cast<char>(pg.kernel == KernelKind::Sinc));
  out.push_back(static_cast<char>(pg.pitches.front()));
  put_f32(out, static_cast<float>(pg.tuning_hz));
  for (double v : pg.scores) put_f32(out, static_cast<float>(v));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

Pitchgram read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pitchgram file '" + path + "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 32 || std::memcmp(data.data(), kMagic, 4) != 0)
    throw std::runtime_error("'" + path + "' is not a PGRM file");
  if (get_u32(data.data() + 4) != kVersion)
    throw std::runtime_error("'" + path + "': unsupported PGRM version");

  Pitchgram pg;
  pg.frames = static_cast<int>(get_u32(data.data() + 8));
  const int cols = static_cast<int>(get_u32(data.data() + 12));
  pg.hop_samples = static_cast<int>(get_u32(data.data() + 16));
  pg.sample_rate_hz = static_cast<int>(get_u32(data.data() + 20));
  pg.variant = data[24] ? PitchgramVariant::PowerInvariant
                        : PitchgramVariant::PowerWeighted;
  pg.domain = data[25] ? Domain::Frequency : Domain::Time;
  pg.kernel = data[26] ? KernelKind::Sinc : KernelKind::Bident;
  const int pitch_low = data[27];
  pg.tuning_hz = get_f32(data.data() + 28);
  for (int j = 0; j < cols; ++j) pg.pitches.push_back(pitch_low + j);

  const std::size_t expect = static_cast<std::size_t>(pg.frames) * cols;
  if (data.size() != 32 + expect * 4)
    throw std::runtime_error("'" + path + "': truncated PGRM payload");
  pg.scores.resize(expect);
  for (std::size_t i = 0; i < expect; ++i)
    pg.scores[i] = get_f32(data.data() + 32 + i * 4);
  return pg;
}

void write_pgm_csv(const Pitchgram& pg, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << "frame";
  for (int p : pg.pitches) f << ",p" << p;
  f << '\n';
  for (int m = 0; m < pg.frames; ++m) {
    f << m;
    for (int j = 0; j < pg.n_pitches(); ++j) f << ',' << pg.at(m, j);
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace pitchgram
