#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "augment_properties.h"
#include "motif/dataset_io.h"
#include "motif/errors.h"

using namespace motif;
using namespace motif::testing;

namespace {

PianoRollChunk chunk(std::vector<ChunkNote> notes, int S = 16) {
  PianoRollChunk c;
  c.song_id = "s";
  c.origin_id = "s:0";
  c.steps_per_bar = S;
  c.notes = std::move(notes);
  return c;
}

// Raw engine draws, restating the documented mapping without the library helpers.
double raw_uniform01(std::mt19937_64& e) { return static_cast<double>(e() >> 11) / 9007199254740992.0; }

}  // namespace

TEST(Transpose, Examples) {
  const auto c = chunk({{0, 4, 60}, {0, 4, 64}, {0, 4, 67}});
  EXPECT_EQ(transpose(c, 0), c);
  const auto t = transpose(c, 2);
  EXPECT_EQ(t.notes[0].pitch, 62);
  EXPECT_EQ(t.notes[1].pitch, 66);
  EXPECT_EQ(t.notes[2].pitch, 69);
  EXPECT_THROW(transpose(chunk({{0, 1, 125}}), 5), DomainError);
}

TEST(Transpose, InfeasibleShiftsAreNeverDrawn) {
  const auto c = chunk({{0, 1, 125}, {1, 1, 100}});
  const auto feasible = feasible_transpositions(c, -12, 12);
  EXPECT_EQ(std::count(feasible.begin(), feasible.end(), 5), 0);
  EXPECT_EQ(feasible.back(), 2);
  Rng rng = derive_stream(1, "transpose");
  for (int i = 0; i < 200; ++i) EXPECT_LE(sample_transposition(c, -12, 12, rng), 2);
  // Notes at both ends of the keyboard leave nothing to draw from.
  EXPECT_THROW(sample_transposition(chunk({{0, 1, 0}, {0, 1, 127}}), -12, 12, rng), SamplingError);
}

TEST(Dropout, Examples) {
  Rng rng = derive_stream(2, "dropout");
  const auto c = chunk({{0, 2, 60}, {2, 2, 62}, {4, 2, 64}, {6, 2, 65}});
  EXPECT_EQ(dropout(c, 0.0, rng), c);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(dropout(c, 1.0, rng).notes.size(), 1u);
}

TEST(Dropout, ReplaysTheRngProtocol) {
  std::vector<ChunkNote> notes;
  for (int i = 0; i < 10; ++i) notes.push_back({i, 1, 50 + i});
  const auto c = chunk(notes);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = derive_stream(seed, "dropout-replay");
    std::mt19937_64 replay = derive_stream(seed, "dropout-replay");
    std::vector<ChunkNote> expect;
    for (const auto& n : notes) {
      if (!(raw_uniform01(replay) < 0.1)) expect.push_back(n);
    }
    ASSERT_FALSE(expect.empty());
    EXPECT_EQ(dropout(c, 0.1, rng).notes, expect) << "seed " << seed;
  }
}

TEST(Dropout, FixedSeedSurvivors) {
  // Survivors of the 10-note chunk above at p = 0.1 for seed 7, frozen from the replay.
  std::vector<ChunkNote> notes;
  for (int i = 0; i < 10; ++i) notes.push_back({i, 1, 50 + i});
  std::mt19937_64 replay = derive_stream(7, "dropout-replay");
  std::vector<int> kept;
  for (int i = 0; i < 10; ++i) {
    if (!(raw_uniform01(replay) < 0.1)) kept.push_back(50 + i);
  }
  Rng rng = derive_stream(7, "dropout-replay");
  std::vector<int> got;
  for (const auto& n : dropout(chunk(notes), 0.1, rng).notes) got.push_back(n.pitch);
  EXPECT_EQ(got, kept);
}

TEST(Shift, Examples) {
  Rng rng = derive_stream(3, "shift");
  const auto c = chunk({{0, 2, 60}, {15, 1, 62}});
  EXPECT_EQ(shift_notes(c, 0.0, rng), c);
  for (int i = 0; i < 50; ++i) {
    const auto s = shift_notes(c, 1.0, rng);
    for (const auto& n : s.notes) {
      if (n.pitch == 60) EXPECT_LE(n.onset_step, 1);
      if (n.pitch == 62) {
        EXPECT_GE(n.onset_step, 14);
        EXPECT_EQ(n.onset_step + n.duration_steps <= 16, true);
      }
    }
  }
}

TEST(Shift, BoundaryClampsKeepNotesInBar) {
  // Find draws that push the first note left and the last note right.
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng = derive_stream(seed, "clamp");
    const auto s = shift_notes(chunk({{0, 1, 60}}), 1.0, rng);
    EXPECT_TRUE(s.notes[0].onset_step == 0 || s.notes[0].onset_step == 1);
    Rng rng2 = derive_stream(seed, "clamp");
    const auto e = shift_notes(chunk({{15, 1, 60}}), 1.0, rng2);
    EXPECT_TRUE(e.notes[0].onset_step == 15 || e.notes[0].onset_step == 14);
    EXPECT_EQ(e.notes[0].duration_steps, 1);
  }
}

TEST(Duration, Examples) {
  const auto c = chunk({{0, 4, 60}, {8, 4, 64}});
  EXPECT_EQ(scale_last_duration(c, 1.0), c);
  EXPECT_EQ(scale_last_duration(c, 0.5).notes[1].duration_steps, 2);
  EXPECT_EQ(scale_last_duration(chunk({{10, 8, 60}}), 2.0).notes[0].duration_steps, 6);
  const auto chord = scale_last_duration(chunk({{0, 2, 50}, {12, 2, 60}, {12, 2, 64}}), 2.0);
  EXPECT_EQ(chord.notes[0].duration_steps, 2);
  EXPECT_EQ(chord.notes[1].duration_steps, 4);
  EXPECT_EQ(chord.notes[2].duration_steps, 4);
}

TEST(Views, CountsAndDeterminism) {
  const auto c = chunk({{0, 4, 60}, {4, 4, 64}, {8, 4, 67}});
  AugmentConfig cfg;
  EXPECT_EQ(make_views(c, cfg).views.size(), 6u);
  cfg.n_views = 0;
  const auto only = make_views(c, cfg);
  ASSERT_EQ(only.views.size(), 1u);
  EXPECT_EQ(only.views[0], c);

  cfg.n_views = 5;
  const auto dir = temp_dir("views");
  write_viewsets_jsonl(dir / "a.jsonl", {make_views(c, cfg)});
  write_viewsets_jsonl(dir / "b.jsonl", {make_views(c, cfg)});
  std::ifstream a(dir / "a.jsonl"), b(dir / "b.jsonl");
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));
}

TEST(Views, ConfigValidation) {
  AugmentConfig cfg;
  cfg.dropout_p = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.n_views = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(AugmentProperties, HoldOnRandomChunks) {
  Rng gen = derive_stream(9, "augment-props");
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_chunk(gen, 16, 10, 0, 127, "p", i);
    Rng rng = derive_stream(i, "augment-props-draws");
    EXPECT_EQ(check_transpose(c, rng), "");
    EXPECT_EQ(check_dropout(c, rng), "");
    EXPECT_EQ(check_shift(c, rng), "");
    EXPECT_EQ(check_duration(c, rng), "");
    if (i % 10 == 0) EXPECT_EQ(check_views(c, static_cast<uint64_t>(i)), "");
  }
}
