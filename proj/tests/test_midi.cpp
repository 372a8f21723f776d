#include <doctest.h>

#include <fstream>

#include "pitchgram/midi.hpp"
#include "test_util.hpp"

using namespace pitchgram;

namespace {

constexpr double kPeriod = 1024.0 / 44100.0;  // 23.2 ms

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("single note lands at the right absolute times") {
  NoteEvent n{69, 0, 10, 100};
  const auto path = testutil::temp_path("one.mid");
  export_midi({n}, kPeriod, path);

  const auto bytes = slurp(path);
  REQUIRE(bytes.size() > 22);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "MThd");
  CHECK(bytes[9] == 0);                      // format 0
  CHECK(((bytes[12] << 8) | bytes[13]) == 480);  // division

  // Re-import on a 1 ms grid: note-on at 0 s, note-off at 10 * 23.2 ms
  const auto back = import_midi(path, 1e-3);
  REQUIRE(back.size() == 1);
  CHECK(back[0].pitch == 69);
  CHECK(back[0].velocity == 100);
  CHECK(back[0].onset_frame == 0);
  CHECK(back[0].offset_frame == doctest::Approx(232).epsilon(0.01));
}

TEST_CASE("empty sequence still writes a valid file") {
  const auto path = testutil::temp_path("empty.mid");
  export_midi({}, kPeriod, path);
  CHECK(import_midi(path, kPeriod).empty());
}

TEST_CASE("overlapping notes at one pitch violate the precondition") {
  const std::vector<NoteEvent> notes{{60, 0, 10, 90}, {60, 5, 15, 90}};
  CHECK_THROWS_WITH_AS(export_midi(notes, kPeriod, testutil::temp_path("o.mid")),
                       doctest::Contains("overlapping"), std::invalid_argument);
}

TEST_CASE("export -> import round-trips the note list") {
  std::vector<NoteEvent> notes{
      {57, 0, 21, 100}, {60, 21, 43, 80}, {64, 43, 64, 127}, {57, 70, 90, 1}};
  const auto path = testutil::temp_path("rt.mid");
  export_midi(notes, kPeriod, path);
  const auto back = import_midi(path, kPeriod);
  REQUIRE(back.size() == notes.size());
  for (std::size_t i = 0; i < notes.size(); ++i) {
    CHECK(back[i].pitch == notes[i].pitch);
    CHECK(back[i].velocity == notes[i].velocity);
    CHECK(back[i].onset_frame == notes[i].onset_frame);
    CHECK(back[i].offset_frame == notes[i].offset_frame);
  }
}

TEST_CASE("tempo change mid-note keeps absolute seconds") {
  // Hand-built format-0 file, 480 ticks/quarter: note-on at tick 0 under the
  // 120 BPM default, tempo doubles to 240 BPM at tick 480, note-off at tick
  // 960. Absolute off time: 480 ticks * (0.5 s / 480) + 480 * (0.25 s / 480)
  // = 0.75 s.
  const unsigned char track[] = {
      0x00, 0x90, 69, 100,              // note-on
      0x83, 0x60, 0xff, 0x51, 0x03, 0x03, 0xd0, 0x90,  // dt 480, tempo 250000
      0x83, 0x60, 0x80, 69, 0x00,       // dt 480, note-off
      0x00, 0xff, 0x2f, 0x00};          // end of track
  std::string blob = "MThd";
  blob += std::string{0, 0, 0, 6, 0, 0, 0, 1, 0x01, (char)0xe0};
  blob += "MTrk";
  blob += std::string{0, 0, 0, (char)sizeof(track)};
  blob.append(reinterpret_cast<const char*>(track), sizeof(track));

  const auto path = testutil::temp_path("tempo.mid");
  std::ofstream(path, std::ios::binary).write(blob.data(), (long)blob.size());

  const auto notes = import_midi(path, 1e-3);
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].onset_frame == 0);
  CHECK(notes[0].offset_frame == 750);
}

TEST_CASE("note-on without note-off is unmatched") {
  const unsigned char track[] = {0x00, 0x90, 60, 100, 0x00, 0xff, 0x2f, 0x00};
  std::string blob = "MThd";
  blob += std::string{0, 0, 0, 6, 0, 0, 0, 1, 0x01, (char)0xe0};
  blob += "MTrk";
  blob += std::string{0, 0, 0, (char)sizeof(track)};
  blob.append(reinterpret_cast<const char*>(track), sizeof(track));
  const auto path = testutil::temp_path("hang.mid");
  std::ofstream(path, std::ios::binary).write(blob.data(), (long)blob.size());

  CHECK_THROWS_WITH_AS(import_midi(path, kPeriod),
                       doctest::Contains("unmatched note-on"), std::runtime_error);
}

TEST_CASE("garbage is a malformed file") {
  const auto path = testutil::temp_path("junk.mid");
  std::ofstream(path, std::ios::binary) << "MThx not midi";
  CHECK_THROWS_AS(import_midi(path, kPeriod), std::runtime_error);
}
