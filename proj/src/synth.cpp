#include "motif/synth.h"

#include <algorithm>
#include <array>
#include <set>

#include "motif/chunking.h"
#include "motif/errors.h"
#include "motif/rng.h"

namespace motif {
namespace {

constexpr std::array<int, 7> kMajorScale{0, 2, 4, 5, 7, 9, 11};

// Chord tones as scale degrees (triad, optional seventh).
std::vector<int> chord_pitches(int key, int degree, bool seventh, int octave_base) {
  std::vector<int> out;
  const int count = seventh ? 4 : 3;
  for (int i = 0; i < count; ++i) {
    const int d = degree + 2 * i;
    out.push_back(octave_base + key + kMajorScale[d % 7] + 12 * (d / 7));
  }
  return out;
}

enum class Pattern { Arpeggio, Block, Alberti, Broken, Syncopated, Waltz, kCount };

void add(std::vector<ChunkNote>& notes, int onset, int dur, int pitch, int S) {
  if (onset < 0 || onset >= S || pitch < 0 || pitch > 127) return;
  notes.push_back({onset, std::max(1, std::min(dur, S - onset)), pitch});
}

std::vector<ChunkNote> render_bar(Pattern pattern, const std::vector<int>& chord, int bass, int S, Rng& rng) {
  std::vector<ChunkNote> notes;
  const int q = std::max(1, S / 4);  // quarter
  const int e = std::max(1, S / 8);  // eighth
  switch (pattern) {
    case Pattern::Arpeggio: {
      add(notes, 0, S, bass, S);
      const int up = static_cast<int>(uniform_index(rng, 2));
      for (int i = 0; i < 8; ++i) {
        const size_t k = up ? i % chord.size() : (chord.size() - 1 - i % chord.size());
        add(notes, i * e, e, chord[k] + 12, S);
      }
      break;
    }
    case Pattern::Block:
      for (int beat = 0; beat < 4; ++beat) {
        add(notes, beat * q, q, bass, S);
        for (int p : chord) add(notes, beat * q, q, p + 12, S);
      }
      break;
    case Pattern::Alberti:
      add(notes, 0, 2 * q, bass, S);
      add(notes, 2 * q, 2 * q, bass + 7, S);
      for (int i = 0; i < 8; ++i) {
        static constexpr int order[4] = {0, 2, 1, 2};
        add(notes, i * e, e, chord[order[i % 4] % chord.size()] + 12, S);
      }
      break;
    case Pattern::Broken:
      add(notes, 0, q, bass, S);
      add(notes, q, q, chord[1] + 12, S);
      add(notes, 2 * q, q, bass + 12, S);
      add(notes, 3 * q, q, chord[2] + 12, S);
      add(notes, 2 * q - e, e, chord[0] + 12, S);
      break;
    case Pattern::Syncopated:
      add(notes, 0, 3 * e, bass, S);
      for (int p : chord) add(notes, 3 * e, 3 * e, p + 12, S);
      add(notes, 6 * e, 2 * e, bass + 12, S);
      for (int p : chord) add(notes, 6 * e, e, p + 12, S);
      break;
    case Pattern::Waltz:
      add(notes, 0, q, bass, S);
      for (int beat = 1; beat < 4; ++beat) {
        add(notes, beat * q, q - e / 2, chord[1] + 12, S);
        add(notes, beat * q, q - e / 2, chord[2] + 12, S);
      }
      break;
    case Pattern::kCount:
      break;
  }
  std::sort(notes.begin(), notes.end());
  notes.erase(std::unique(notes.begin(), notes.end()), notes.end());
  return notes;
}

// Splits some eighth notes into two sixteenths and thins out upper voices; the bass on
// step 0 is kept so every bar stays anchored.
void embellish(std::vector<ChunkNote>& notes, const std::vector<int>& chord, int S, Rng& rng) {
  const int sixteenth = std::max(1, S / 16);
  std::vector<ChunkNote> out;
  for (const auto& n : notes) {
    if (n.onset_step == 0 && n.pitch < chord[0]) {
      out.push_back(n);
      continue;
    }
    if (bernoulli(rng, 0.12)) continue;
    if (n.duration_steps == 2 * sixteenth && bernoulli(rng, 0.25)) {
      out.push_back({n.onset_step, sixteenth, n.pitch});
      add(out, n.onset_step + sixteenth, sixteenth, chord[uniform_index(rng, chord.size())] + 12, S);
      continue;
    }
    out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty()) notes = std::move(out);
}

std::vector<ChunkNote> random_bar(int key, const std::array<Pattern, 2>& styles, int S, Rng& rng) {
  static constexpr int degrees[6] = {0, 3, 4, 5, 1, 2};
  const int degree = degrees[uniform_index(rng, 6)];
  const bool seventh = bernoulli(rng, 0.3);
  const int octave = 48 + 12 * static_cast<int>(uniform_index(rng, 2)) - 12 * static_cast<int>(uniform_index(rng, 2));
  auto chord = chord_pitches(key, degree, seventh, octave);
  const int bass = chord[0] - 12;
  const auto inversion = uniform_index(rng, chord.size());
  for (size_t i = 0; i < inversion; ++i) {
    chord.push_back(chord.front() + 12);
    chord.erase(chord.begin());
  }
  const Pattern p = styles[uniform_index(rng, styles.size())];
  auto notes = render_bar(p, chord, bass, S, rng);
  embellish(notes, chord, S, rng);
  return notes;
}

// Pitch-relative shape; bars equal up to transposition share it.
std::vector<ChunkNote> shape_of(std::vector<ChunkNote> notes) {
  int low = 127;
  for (const auto& n : notes) low = std::min(low, n.pitch);
  for (auto& n : notes) n.pitch -= low;
  std::sort(notes.begin(), notes.end());
  return notes;
}

// Draws bars until one has a shape not seen before, so distinct origins stay
// distinguishable under transposition.
std::vector<ChunkNote> fresh_bar(int key, const std::array<Pattern, 2>& styles, int S, Rng& rng,
                                 std::set<std::vector<ChunkNote>>& seen) {
  constexpr int kAttempts = 64;
  std::vector<ChunkNote> bar;
  for (int i = 0; i < kAttempts; ++i) {
    bar = random_bar(key, styles, S, rng);
    if (seen.insert(shape_of(bar)).second) return bar;
  }
  return bar;
}

std::array<Pattern, 2> song_styles(Rng& rng) {
  const auto n = static_cast<uint64_t>(Pattern::kCount);
  return {static_cast<Pattern>(uniform_index(rng, n)), static_cast<Pattern>(uniform_index(rng, n))};
}

/// Bars become notes in beats (beats_per_bar = 4), so chunking at S reproduces them exactly.
Track bars_to_track(const std::vector<std::vector<ChunkNote>>& bars, int S, TrackRole role, const std::string& name) {
  Track t{role, name, {}};
  const double beats_per_step = 4.0 / S;
  for (size_t b = 0; b < bars.size(); ++b) {
    for (const auto& n : bars[b]) {
      t.notes.push_back({(static_cast<double>(b) * S + n.onset_step) * beats_per_step, n.duration_steps * beats_per_step,
                         n.pitch, 80, name});
    }
  }
  return t;
}

PianoRollChunk as_chunk(std::vector<ChunkNote> notes, int S) {
  PianoRollChunk c;
  c.steps_per_bar = S;
  c.notes = std::move(notes);
  c.origin_id = "tmp:0";
  return c;
}

/// One transformed occurrence of a motif; at least one transform applies.
std::vector<ChunkNote> vary(const std::vector<ChunkNote>& base, int S, Rng& rng) {
  AugmentConfig cfg;
  cfg.transpose_min = -5;
  cfg.transpose_max = 5;
  cfg.dropout_p = 0.1;
  cfg.shift_p = 0.15;
  PianoRollChunk c = as_chunk(base, S);
  const bool t = bernoulli(rng, 0.5), d = bernoulli(rng, 0.4), s = bernoulli(rng, 0.4), l = bernoulli(rng, 0.3);
  if (t) {
    const auto feasible = feasible_transpositions(c, cfg.transpose_min, cfg.transpose_max);
    if (!feasible.empty()) c = transpose(c, feasible[uniform_index(rng, feasible.size())]);
  }
  if (d) c = dropout(c, cfg.dropout_p, rng);
  if (s) c = shift_notes(c, cfg.shift_p, rng);
  if (l) c = vary_last_duration(c, cfg.duration_factor_min, cfg.duration_factor_max, rng);
  return c.notes;
}

}  // namespace

std::vector<Song> synth_pretrain_songs(const PretrainFixtureConfig& cfg) {
  if (cfg.n_origins <= 0 || cfg.bars_per_song <= 0 || cfg.steps_per_bar < 8) {
    throw ConfigError("pretrain fixture needs positive n_origins/bars_per_song and steps_per_bar >= 8");
  }
  Rng rng = derive_stream(cfg.seed, "synth.pretrain." + cfg.song_prefix);
  std::vector<Song> songs;
  std::set<std::vector<ChunkNote>> seen;
  int made = 0;
  for (int s = 0; made < cfg.n_origins; ++s) {
    const int key = static_cast<int>(uniform_index(rng, 12));
    const auto styles = song_styles(rng);
    const int bars = std::min(cfg.bars_per_song, cfg.n_origins - made);
    std::vector<std::vector<ChunkNote>> content;
    for (int b = 0; b < bars; ++b) content.push_back(fresh_bar(key, styles, cfg.steps_per_bar, rng, seen));
    Song song;
    song.song_id = cfg.song_prefix + std::to_string(s);
    song.tracks.push_back(bars_to_track(content, cfg.steps_per_bar, TrackRole::Accompaniment, "PIANO"));
    songs.push_back(std::move(song));
    made += bars;
  }
  return songs;
}

std::vector<Song> synth_labeled_songs(const LabeledFixtureConfig& cfg) {
  if (cfg.n_songs <= 0 || cfg.min_motifs < 1 || cfg.max_motifs < cfg.min_motifs || cfg.min_occurrences < 2 ||
      cfg.max_occurrences < cfg.min_occurrences || cfg.filler_bars < 0 || cfg.steps_per_bar < 8) {
    throw ConfigError("invalid labeled fixture configuration");
  }
  Rng rng = derive_stream(cfg.seed, "synth.labeled." + cfg.song_prefix);
  const int S = cfg.steps_per_bar;
  std::vector<Song> songs;
  std::set<std::vector<ChunkNote>> seen;
  for (int s = 0; s < cfg.n_songs; ++s) {
    const int key = static_cast<int>(uniform_index(rng, 12));
    const auto styles = song_styles(rng);
    const int n_motifs = uniform_int(rng, cfg.min_motifs, cfg.max_motifs);

    // (motif id or -1, notes)
    std::vector<std::pair<int, std::vector<ChunkNote>>> bars;
    for (int m = 0; m < n_motifs; ++m) {
      const auto base = fresh_bar(key, styles, S, rng, seen);
      const int occurrences = uniform_int(rng, cfg.min_occurrences, cfg.max_occurrences);
      bars.push_back({m, base});
      for (int o = 1; o < occurrences; ++o) bars.push_back({m, vary(base, S, rng)});
    }
    for (int f = 0; f < cfg.filler_bars; ++f) bars.push_back({-1, fresh_bar(key, styles, S, rng, seen)});
    for (size_t i = bars.size(); i > 1; --i) std::swap(bars[i - 1], bars[uniform_index(rng, i)]);

    std::vector<std::vector<ChunkNote>> content;
    Track label{TrackRole::Label, "MOTIF", {}};
    for (size_t b = 0; b < bars.size(); ++b) {
      content.push_back(bars[b].second);
      if (bars[b].first >= 0) label.notes.push_back({static_cast<double>(b) * 4.0, 4.0, bars[b].first, 100, "MOTIF"});
    }
    Song song;
    song.song_id = cfg.song_prefix + std::to_string(s);
    song.tracks.push_back(bars_to_track(content, S, TrackRole::Accompaniment, "PIANO"));
    song.tracks.push_back(std::move(label));
    songs.push_back(std::move(song));
  }
  return songs;
}

std::vector<PianoRollChunk> chunk_synthetic(const std::vector<Song>& songs, int steps_per_bar) {
  std::vector<PianoRollChunk> out;
  for (const auto& song : songs) {
    auto chunks = chunk_song(song, {TrackRole::Accompaniment}, steps_per_bar);
    out.insert(out.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
  }
  return out;
}

}  // namespace motif
