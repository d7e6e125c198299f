#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "motif/chunking.h"
#include "motif/dataset_io.h"
#include "oracles.h"
#include "support.h"

using namespace motif;
using namespace motif::testing;

namespace {

Song song_with(std::vector<NoteEvent> notes, TrackRole role = TrackRole::Accompaniment) {
  Song s;
  s.song_id = "s";
  s.tracks.push_back({role, "PIANO", std::move(notes)});
  return s;
}

NoteEvent note(double onset, double dur, int pitch) { return {onset, dur, pitch, std::nullopt, ""}; }

PianoRollChunk bar(int index) {
  PianoRollChunk c;
  c.song_id = "s";
  c.bar_index = index;
  c.origin_id = make_origin_id("s", index);
  c.notes = {{0, 4, 60}};
  return c;
}

}  // namespace

TEST(Chunking, EightFullBarsGiveEightChunks) {
  std::vector<NoteEvent> notes;
  for (int b = 0; b < 8; ++b) notes.push_back(note(b * 4.0, 1.0, 60 + b));
  const auto chunks = chunk_song(song_with(notes), {TrackRole::Accompaniment});
  ASSERT_EQ(chunks.size(), 8u);
  for (int b = 0; b < 8; ++b) EXPECT_EQ(chunks[b].bar_index, b);
}

TEST(Chunking, CrossingNoteIsTruncatedAtItsBar) {
  const auto chunks = chunk_song(song_with({note(3 * 4.0 + 3.0, 3.0, 60)}), {TrackRole::Accompaniment});
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].bar_index, 3);
  ASSERT_EQ(chunks[0].notes.size(), 1u);
  EXPECT_EQ(chunks[0].notes[0].onset_step, 12);
  EXPECT_EQ(chunks[0].notes[0].duration_steps, 4);
}

TEST(Chunking, EmptyBarsAndOtherRolesAreSkipped) {
  Song s = song_with({note(0, 1, 60), note(8, 1, 62)});
  s.tracks.push_back({TrackRole::Melody, "MELODY", {note(4, 1, 72)}});
  const auto chunks = chunk_song(s, {TrackRole::Accompaniment});
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].bar_index, 0);
  EXPECT_EQ(chunks[1].bar_index, 2);
}

TEST(Chunking, QuantizesToNearestStepAndKeepsOneStepMinimum) {
  const auto chunks = chunk_song(song_with({note(0.13, 0.01, 60)}), {TrackRole::Accompaniment});
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].notes[0].onset_step, 1);  // 0.13 beats = 0.52 steps
  EXPECT_EQ(chunks[0].notes[0].duration_steps, 1);
}

TEST(Chunking, NonPositiveResolutionIsConfigError) {
  EXPECT_THROW(chunk_song(song_with({note(0, 1, 60)}), {TrackRole::Accompaniment}, 0), ConfigError);
}

TEST(Chunking, RandomSongsNeverProduceEmptyOrOutOfBarNotes) {
  Rng rng = derive_stream(21, "chunk-props");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NoteEvent> notes;
    const int n = uniform_int(rng, 1, 30);
    for (int i = 0; i < n; ++i) notes.push_back(note(uniform_real(rng, 0, 40), uniform_real(rng, 0.05, 6), uniform_int(rng, 0, 127)));
    const int S = uniform_int(rng, 1, 32);
    for (const auto& c : chunk_song(song_with(notes), {TrackRole::Accompaniment}, S)) {
      EXPECT_FALSE(c.notes.empty());
      for (const auto& cn : c.notes) {
        EXPECT_GE(cn.onset_step, 0);
        EXPECT_LT(cn.onset_step, S);
        EXPECT_GE(cn.duration_steps, 1);
        EXPECT_LE(cn.onset_step + cn.duration_steps, S);
      }
    }
  }
}

TEST(Rasterize, Examples) {
  PianoRollChunk c;
  c.notes = {{0, 16, 60}};
  PianoRoll r = rasterize(c);
  EXPECT_EQ(r.active_cells(), 16u);
  for (int t = 0; t < 16; ++t) EXPECT_TRUE(r.at(60, t));
  EXPECT_FALSE(r.at(61, 0));

  c.notes = {{0, 4, 60}, {4, 4, 60}};
  r = rasterize(c);
  for (int t = 0; t < 8; ++t) EXPECT_TRUE(r.at(60, t));
  EXPECT_FALSE(r.at(60, 8));

  c.notes = {{0, 1, 40}, {2, 3, 50}, {10, 2, 60}};
  EXPECT_EQ(rasterize(c).active_cells(), 6u);
}

TEST(Rasterize, CellCountMatchesDurationsForDisjointNotes) {
  Rng rng = derive_stream(22, "raster");
  for (int trial = 0; trial < 200; ++trial) {
    PianoRollChunk c;
    std::set<int> pitches;
    int total = 0;
    for (int i = 0; i < uniform_int(rng, 1, 10); ++i) {
      const int p = uniform_int(rng, 0, 127);
      if (!pitches.insert(p).second) continue;
      const int onset = uniform_int(rng, 0, 15);
      const int dur = uniform_int(rng, 1, 16 - onset);
      c.notes.push_back({onset, dur, p});
      total += dur;
    }
    size_t count = 0;
    const PianoRoll r = rasterize(c);
    for (int p = 0; p < 128; ++p) {
      for (int t = 0; t < 16; ++t) count += r.at(p, t) ? 1 : 0;
    }
    EXPECT_EQ(count, static_cast<size_t>(total));
  }
}

TEST(Labels, FullBarNoteLabelsTheChunk) {
  const auto labels = match_labels({bar(0)}, {note(0, 4, 72)});
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].motif_id, 72);
}

TEST(Labels, ExactlyThreeQuartersIsUnlabeled) {
  EXPECT_TRUE(match_labels({bar(0)}, {note(0, 3, 72)}).empty());
  EXPECT_EQ(match_labels({bar(0)}, {note(0, 3.0001, 72)}).size(), 1u);
}

TEST(Labels, LargestCoverageWinsAndOverlapWarns) {
  Warnings w;
  const auto labels = match_labels({bar(0)}, {note(0, 3.2, 70), note(2.8, 1.2, 71)}, 4, &w);
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].motif_id, 70);
  EXPECT_FALSE(w.empty());
}

TEST(Labels, TiesGoToTheLowerPitch) {
  Warnings w;
  const auto labels = match_labels({bar(0)}, {note(0, 4, 75), note(0, 4, 73)}, 4, &w);
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].motif_id, 73);
}

TEST(Labels, AgreeWithOracleOnRandomTracks) {
  Rng rng = derive_stream(23, "labels");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<PianoRollChunk> chunks;
    for (int b = 0; b < 12; ++b) {
      if (bernoulli(rng, 0.8)) chunks.push_back(bar(b));
    }
    std::vector<NoteEvent> track;
    for (int i = 0; i < uniform_int(rng, 0, 14); ++i) {
      // Quarter-beat grid so coverages of exactly 0.75 occur.
      const double onset = uniform_int(rng, 0, 47) * 0.25;
      track.push_back(note(onset, uniform_int(rng, 1, 20) * 0.25, uniform_int(rng, 60, 66)));
    }
    Warnings w;
    const auto got = match_labels(chunks, track, 4, &w);
    const auto want = oracle::labels(chunks, track, 4);
    ASSERT_EQ(got.size(), want.size());
    for (size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], want[i]);
  }
}

TEST(Labels, SummaryStatistics) {
  const std::vector<MotifLabel> labels{{"a", 0, 1}, {"a", 1, 1}, {"a", 2, 2}, {"b", 0, 1}, {"b", 3, 1}, {"b", 4, 1}};
  const auto s = summarize_labels(labels);
  EXPECT_DOUBLE_EQ(s.mean_motifs_per_song, 1.5);  // a: {1, 2}, b: {1}
  EXPECT_DOUBLE_EQ(s.mean_occurrences_per_motif, 2.0);
}

TEST(Ibpr, Examples) {
  PianoRollChunk c;
  c.notes = {{0, 1, 60}, {0, 1, 64}, {2, 1, 67}};
  const auto n = ibpr_normalize(c);
  EXPECT_EQ(n.notes[0].pitch, 0);
  EXPECT_EQ(n.notes[1].pitch, 4);
  EXPECT_EQ(n.notes[2].pitch, 7);
  EXPECT_EQ(ibpr_normalize(n).notes, n.notes);
  c.notes = {{3, 2, 127}};
  EXPECT_EQ(ibpr_normalize(c).notes[0].pitch, 0);
  c.notes.clear();
  EXPECT_THROW(ibpr_normalize(c), DomainError);
}

TEST(Ibpr, IdempotentAndIntervalPreserving) {
  Rng rng = derive_stream(24, "ibpr");
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_chunk(rng, 16, 8, 0, 127);
    const auto n = ibpr_normalize(c);
    EXPECT_EQ(ibpr_normalize(n).notes, n.notes);
    const int shift = c.notes[0].pitch - n.notes[0].pitch;
    for (size_t i = 0; i < c.notes.size(); ++i) {
      EXPECT_EQ(c.notes[i].pitch - n.notes[i].pitch, shift);
      EXPECT_EQ(c.notes[i].onset_step, n.notes[i].onset_step);
      EXPECT_EQ(c.notes[i].duration_steps, n.notes[i].duration_steps);
    }
  }
}

TEST(DatasetIo, JsonlRoundTrip) {
  const auto dir = temp_dir("io");
  Rng rng = derive_stream(25, "io");
  std::vector<PianoRollChunk> chunks;
  for (int i = 0; i < 5; ++i) chunks.push_back(random_chunk(rng, 16, 6, 30, 90, "song", i));
  write_chunks_jsonl(dir / "c.jsonl", chunks);
  EXPECT_EQ(read_chunks_jsonl(dir / "c.jsonl"), chunks);
  const std::vector<MotifLabel> labels{{"song", 0, 3}, {"song", 4, 5}};
  write_labels_jsonl(dir / "l.jsonl", labels);
  EXPECT_EQ(read_labels_jsonl(dir / "l.jsonl"), labels);
  {
    std::ofstream csv(dir / "l.csv");
    csv << "song_id,bar_index,motif_id\nsong,0,3\nsong,4,5\n";
  }
  EXPECT_EQ(read_labels_csv(dir / "l.csv"), labels);
}

TEST(DatasetIo, BuildsLabeledDatasetFromSongs) {
  Song s = song_with({note(0, 1, 60), note(4, 1, 62), note(8, 1, 64)});
  s.tracks.push_back({TrackRole::Label, "MOTIF", {note(0, 4, 5), note(8, 4, 5)}});
  const auto ds = build_labeled_dataset({s}, {TrackRole::Accompaniment});
  EXPECT_EQ(ds.chunks.size(), 3u);
  ASSERT_EQ(ds.labels.size(), 2u);
  EXPECT_EQ(ds.labels[1].bar_index, 2);
  EXPECT_DOUBLE_EQ(ds.summary.mean_occurrences_per_motif, 2.0);
}
