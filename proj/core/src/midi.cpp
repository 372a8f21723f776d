#include "pitchgram/midi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>

namespace pitchgram {

namespace {

constexpr int kTicksPerQuarter = 480;
constexpr int kDefaultTempoUs = 500000;  // 120 BPM

void put_u32be(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_u16be(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_vlq(std::string& out, uint32_t v) {
  char buf[5];
  int n = 0;
  buf[n++] = static_cast<char>(v & 0x7f);
  while (v >>= 7) buf[n++] = static_cast<char>((v & 0x7f) | 0x80);
  while (n--) out.push_back(buf[n]);
}

struct TrackEvent {
  long tick;
  int order;  // stable sort key: offs before ons at equal ticks
  unsigned char status, d1, d2;
};

}  // namespace

void export_midi(const std::vector<NoteEvent>& notes, double frame_period_s,
                 const std::string& path) {
  if (frame_period_s <= 0.0)
    throw std::invalid_argument("export_midi: frame period must be positive");

  // Overlap precondition, per pitch
  std::map<int, std::vector<std::pair<int, int>>> per_pitch;
  for (const NoteEvent& n : notes) {
    if (n.pitch < 0 || n.pitch > 127)
      throw std::invalid_argument("export_midi: pitch out of MIDI range");
    if (n.offset_frame <= n.onset_frame)
      throw std::invalid_argument("export_midi: note with non-positive duration");
    per_pitch[n.pitch].emplace_back(n.onset_frame, n.offset_frame);
  }
  for (auto& [pitch, spans] : per_pitch) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i)
      if (spans[i].first < spans[i - 1].second)
        throw std::invalid_argument(
            "export_midi: overlapping notes at pitch " + std::to_string(pitch));
  }

  const double ticks_per_second =
      kTicksPerQuarter * 1e6 / static_cast<double>(kDefaultTempoUs);

  std::vector<TrackEvent> events;
  events.reserve(notes.size() * 2);
  for (const NoteEvent& n : notes) {
    const long on = std::lround(n.onset_frame * frame_period_s * ticks_per_second);
    long off = std::lround(n.offset_frame * frame_period_s * ticks_per_second);
    if (off <= on) off = on + 1;
    const unsigned char vel =
        static_cast<unsigned char>(std::clamp(n.velocity, 1, 127));
    const unsigned char pitch = static_cast<unsigned char>(n.pitch);
    events.push_back({off, 0, 0x80, pitch, 0});
    events.push_back({on, 1, 0x90, pitch, vel});
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const TrackEvent& a, const TrackEvent& b) {
                     return std::tie(a.tick, a.order) < std::tie(b.tick, b.order);
                   });

  std::string track;
  // Tempo meta event at t = 0
  put_vlq(track, 0);
  track += '\xff';
  track += '\x51';
  track += '\x03';
  track.push_back(static_cast<char>((kDefaultTempoUs >> 16) & 0xff));
  track.push_back(static_cast<char>((kDefaultTempoUs >> 8) & 0xff));
  track.push_back(static_cast<char>(kDefaultTempoUs & 0xff));

  long cursor = 0;
  for (const TrackEvent& e : events) {
    put_vlq(track, static_cast<uint32_t>(e.tick - cursor));
    cursor = e.tick;
    track.push_back(static_cast<char>(e.status));
    track.push_back(static_cast<char>(e.d1));
    track.push_back(static_cast<char>(e.d2));
  }
  // End of track
  put_vlq(track, 0);
  track += '\xff';
  track += '\x2f';
  track += '\x00';

  std::string out;
  out += "MThd";
  put_u32be(out, 6);
  put_u16be(out, 0);  // format 0
  put_u16be(out, 1);  // one track
  put_u16be(out, kTicksPerQuarter);
  out += "MTrk";
  put_u32be(out, static_cast<uint32_t>(track.size()));
  out += track;

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

struct RawEvent {
  long tick;
  int seq;  // merge order for stable FIFO pairing
  bool on;
  int pitch, velocity;
};

struct Parser {
  const unsigned char* p;
  const unsigned char* end;
  const std::string& path;

  unsigned char u8() {
    if (p >= end) fail("truncated track");
    return *p++;
  }
  uint32_t vlq() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      unsigned char b = u8();
      v = (v << 7) | (b & 0x7f);
      if (!(b & 0x80)) return v;
    }
    fail("variable-length quantity too long");
  }
  void skip(std::size_t n) {
    if (static_cast<std::size_t>(end - p) < n) fail("truncated track");
    p += n;
  }
  [[noreturn]] void fail(const char* why) const {
    throw std::runtime_error("malformed MIDI file '" + path + "': " + why);
  }
};

}  // namespace

std::vector<NoteEvent> import_midi(const std::string& path,
                                   double frame_period_s) {
  if (frame_period_s <= 0.0)
    throw std::invalid_argument("import_midi: frame period must be positive");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open MIDI file '" + path + "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 14 || std::memcmp(data.data(), "MThd", 4) != 0)
    throw std::runtime_error("malformed MIDI file '" + path + "': no MThd");

  const int format = (data[8] << 8) | data[9];
  const int n_tracks = (data[10] << 8) | data[11];
  const int division = (data[12] << 8) | data[13];
  if (format != 0 && format != 1)
    throw std::runtime_error("malformed MIDI file '" + path +
                             "': unsupported format " + std::to_string(format));
  if (division & 0x8000)
    throw std::runtime_error("malformed MIDI file '" + path +
                             "': SMPTE division not supported");
  if (division == 0)
    throw std::runtime_error("malformed MIDI file '" + path + "': zero division");

  std::vector<RawEvent> raw;
  std::map<long, int> tempo_map;  // tick -> microseconds per quarter
  tempo_map[0] = kDefaultTempoUs;

  std::size_t pos = 14;
  int seq = 0;
  for (int t = 0; t < n_tracks; ++t) {
    if (pos + 8 > data.size())
      throw std::runtime_error("malformed MIDI file '" + path +
                               "': missing track " + std::to_string(t));
    if (std::memcmp(data.data() + pos, "MTrk", 4) != 0)
      throw std::runtime_error("malformed MIDI file '" + path + "': no MTrk");
    const uint32_t len = (data[pos + 4] << 24) | (data[pos + 5] << 16) |
                         (data[pos + 6] << 8) | data[pos + 7];
    if (pos + 8 + len > data.size())
      throw std::runtime_error("malformed MIDI file '" + path +
                               "': truncated track");
    Parser ps{data.data() + pos + 8, data.data() + pos + 8 + len, path};
    pos += 8 + len;

    long tick = 0;
    unsigned char running = 0;
    while (ps.p < ps.end) {
      tick += ps.vlq();
      unsigned char status = *ps.p;
      if (status & 0x80) {
        ps.u8();
        if (status < 0xf0) running = status;
      } else {
        if (running == 0) ps.fail("data byte without running status");
        status = running;
      }
      if (status == 0xff) {
        const unsigned char type = ps.u8();
        const uint32_t mlen = ps.vlq();
        if (type == 0x51 && mlen == 3) {
          const int us = (ps.u8() << 16) | (ps.u8() << 8) | ps.u8();
          tempo_map[tick] = us;
        } else {
          ps.skip(mlen);
        }
      } else if (status == 0xf0 || status == 0xf7) {
        ps.skip(ps.vlq());
      } else {
        const unsigned char kind = status & 0xf0;
        const int d1 = ps.u8();
        int d2 = 0;
        if (kind != 0xc0 && kind != 0xd0) d2 = ps.u8();
        if (kind == 0x90 && d2 > 0)
          raw.push_back({tick, seq++, true, d1, d2});
        else if (kind == 0x80 || (kind == 0x90 && d2 == 0))
          raw.push_back({tick, seq++, false, d1, d2});
      }
    }
  }

  // Ticks -> absolute seconds through the tempo map
  std::vector<std::pair<long, double>> tempo_seconds;  // (tick, seconds at tick)
  std::vector<int> tempo_us;
  {
    double sec = 0.0;
    long prev_tick = 0;
    int prev_us = kDefaultTempoUs;
    for (auto [tk, us] : tempo_map) {
      sec += (tk - prev_tick) * (prev_us * 1e-6) / division;
      tempo_seconds.emplace_back(tk, sec);
      tempo_us.push_back(us);
      prev_tick = tk;
      prev_us = us;
    }
  }
  auto tick_to_seconds = [&](long tick) {
    std::size_t i = tempo_seconds.size() - 1;
    while (i > 0 && tempo_seconds[i].first > tick) --i;
    return tempo_seconds[i].second +
           (tick - tempo_seconds[i].first) * (tempo_us[i] * 1e-6) / division;
  };

  std::stable_sort(raw.begin(), raw.end(),
                   [](const RawEvent& a, const RawEvent& b) {
                     return std::tie(a.tick, a.seq) < std::tie(b.tick, b.seq);
                   });

  std::vector<NoteEvent> notes;
  std::map<int, std::deque<std::pair<double, int>>> open;  // pitch -> (onset_s, vel)
  for (const RawEvent& e : raw) {
    const double sec = tick_to_seconds(e.tick);
    if (e.on) {
      open[e.pitch].emplace_back(sec, e.velocity);
    } else {
      auto it = open.find(e.pitch);
      if (it == open.end() || it->second.empty())
        throw std::runtime_error("malformed MIDI file '" + path +
                                 "': note-off without note-on at pitch " +
                                 std::to_string(e.pitch));
      auto [onset_s, vel] = it->second.front();
      it->second.pop_front();
      NoteEvent n;
      n.pitch = e.pitch;
      n.velocity = vel;
      n.onset_frame = static_cast<int>(std::lround(onset_s / frame_period_s));
      n.offset_frame = static_cast<int>(std::lround(sec / frame_period_s));
      if (n.offset_frame <= n.onset_frame) n.offset_frame = n.onset_frame + 1;
      notes.push_back(n);
    }
  }
  for (const auto& [pitch, pending] : open)
    if (!pending.empty())
      throw std::runtime_error("unmatched note-on at pitch " +
                               std::to_string(pitch) + " in '" + path + "'");

  std::sort(notes.begin(), notes.end(), [](const NoteEvent& a, const NoteEvent& b) {
    return std::tie(a.onset_frame, a.pitch) < std::tie(b.onset_frame, b.pitch);
  });
  return notes;
}

}  // namespace pitchgram
