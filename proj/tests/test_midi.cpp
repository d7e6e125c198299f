#include <gtest/gtest.h>

#include "motif/midi.h"

using namespace motif;

namespace {

using Bytes = std::vector<uint8_t>;

Bytes header(uint16_t format, uint16_t tracks, uint16_t division) {
  return {'M', 'T', 'h', 'd', 0, 0, 0, 6, static_cast<uint8_t>(format >> 8), static_cast<uint8_t>(format),
          static_cast<uint8_t>(tracks >> 8), static_cast<uint8_t>(tracks), static_cast<uint8_t>(division >> 8),
          static_cast<uint8_t>(division)};
}

Bytes track(const Bytes& events) {
  Bytes t{'M', 'T', 'r', 'k'};
  const auto n = static_cast<uint32_t>(events.size());
  t.push_back(static_cast<uint8_t>(n >> 24));
  t.push_back(static_cast<uint8_t>(n >> 16));
  t.push_back(static_cast<uint8_t>(n >> 8));
  t.push_back(static_cast<uint8_t>(n));
  t.insert(t.end(), events.begin(), events.end());
  return t;
}

Bytes cat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// One C4 quarter note at beat 0; 480 ticks per beat, 480 = VLQ 0x83 0x60.
const Bytes kSingleNote = cat({header(0, 1, 480), track({0x00, 0x90, 60, 100, 0x83, 0x60, 0x80, 60, 0, 0x00, 0xFF, 0x2F, 0x00})});

}  // namespace

TEST(Midi, SingleNoteFixture) {
  const Song s = parse_midi(kSingleNote, {"one"});
  ASSERT_EQ(s.tracks.size(), 1u);
  ASSERT_EQ(s.tracks[0].notes.size(), 1u);
  const NoteEvent& n = s.tracks[0].notes[0];
  EXPECT_EQ(n.onset_beats, 0.0);
  EXPECT_EQ(n.duration_beats, 1.0);
  EXPECT_EQ(n.pitch, 60);
  EXPECT_EQ(n.velocity, 100);
  EXPECT_EQ(s.beats_per_bar, 4);
  EXPECT_EQ(s.song_id, "one");
}

TEST(Midi, RunningStatusAndNoteOnVelocityZero) {
  // note-on 60, running-status note-on 64, then both released via velocity-0 note-ons.
  const Bytes f = cat({header(0, 1, 96), track({0x00, 0x90, 60, 90, 0x00, 64, 90, 0x60, 60, 0, 0x30, 64, 0, 0x00, 0xFF,
                                                  0x2F, 0x00})});
  const Song s = parse_midi(f);
  ASSERT_EQ(s.tracks.size(), 1u);
  const auto& notes = s.tracks[0].notes;
  ASSERT_EQ(notes.size(), 2u);
  EXPECT_EQ(notes[0].pitch, 60);
  EXPECT_EQ(notes[0].duration_beats, 1.0);
  EXPECT_EQ(notes[1].pitch, 64);
  EXPECT_EQ(notes[1].duration_beats, 1.5);
}

TEST(Midi, EmptyTrackListIsNotAnError) {
  const Song s = parse_midi(header(1, 0, 480));
  EXPECT_TRUE(s.tracks.empty());
}

TEST(Midi, TruncatedHeaderIsParseError) {
  const Bytes f(kSingleNote.begin(), kSingleNote.begin() + 10);
  EXPECT_THROW(parse_midi(f), ParseError);
}

TEST(Midi, TruncatedTrackNamesOffset) {
  Bytes f = kSingleNote;
  f.resize(f.size() - 5);
  try {
    parse_midi(f);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GE(e.offset(), 14u);
  }
}

TEST(Midi, UnmatchedNoteOnWarnsAndDrops) {
  const Bytes f = cat({header(0, 1, 480), track({0x00, 0x90, 60, 100, 0x00, 0x90, 62, 100, 0x83, 0x60, 0x80, 62, 0,
                                                   0x00, 0xFF, 0x2F, 0x00})});
  Warnings w;
  const Song s = parse_midi(f, {}, &w);
  ASSERT_EQ(s.tracks.size(), 1u);
  ASSERT_EQ(s.tracks[0].notes.size(), 1u);
  EXPECT_EQ(s.tracks[0].notes[0].pitch, 62);
  EXPECT_FALSE(w.empty());
}

TEST(Midi, TimeSignatureSetsBeatsPerBar) {
  // 3/4: FF 58 04 03 02 18 08
  const Bytes f = cat({header(0, 1, 480), track({0x00, 0xFF, 0x58, 0x04, 3, 2, 0x18, 0x08, 0x00, 0x90, 60, 100, 0x83,
                                                   0x60, 0x80, 60, 0, 0x00, 0xFF, 0x2F, 0x00})});
  EXPECT_EQ(parse_midi(f).beats_per_bar, 3);
}

TEST(Midi, RolesFollowTrackNames) {
  MidiParseOptions o;
  EXPECT_EQ(assign_role("MELODY", o), TrackRole::Melody);
  EXPECT_EQ(assign_role("Bridge", o), TrackRole::Melody);
  EXPECT_EQ(assign_role("PIANO", o), TrackRole::Accompaniment);
  EXPECT_EQ(assign_role("motif labels", o), TrackRole::Label);
  o.role_by_name["bridge"] = TrackRole::Accompaniment;
  EXPECT_EQ(assign_role("BRIDGE", o), TrackRole::Accompaniment);
}

TEST(Midi, WriterRoundTrip) {
  Song s;
  s.song_id = "rt";
  s.beats_per_bar = 4;
  s.tracks.push_back({TrackRole::Accompaniment, "PIANO", {{0.0, 0.5, 48, 70, ""}, {0.5, 1.25, 55, 71, ""}, {4.0, 4.0, 60, 72, ""}}});
  s.tracks.push_back({TrackRole::Label, "MOTIF", {{0.0, 4.0, 3, 100, ""}}});
  const Song back = parse_midi(write_midi(s), {"rt"});
  ASSERT_EQ(back.tracks.size(), 2u);
  EXPECT_EQ(back.tracks[0].role, TrackRole::Accompaniment);
  EXPECT_EQ(back.tracks[1].role, TrackRole::Label);
  ASSERT_EQ(back.tracks[0].notes.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.tracks[0].notes[i].onset_beats, s.tracks[0].notes[i].onset_beats);
    EXPECT_EQ(back.tracks[0].notes[i].duration_beats, s.tracks[0].notes[i].duration_beats);
    EXPECT_EQ(back.tracks[0].notes[i].pitch, s.tracks[0].notes[i].pitch);
  }
}
