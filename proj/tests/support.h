#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "motif/rng.h"
#include "motif/types.h"

namespace motif::testing {

/// Random valid chunk: n notes (1..max_notes) with pitches in [lo, hi].
inline PianoRollChunk random_chunk(Rng& rng, int S = 16, int max_notes = 8, int lo = 36, int hi = 84,
                                   const std::string& song = "s", int bar = 0) {
  PianoRollChunk c;
  c.song_id = song;
  c.bar_index = bar;
  c.steps_per_bar = S;
  c.origin_id = make_origin_id(song, bar);
  const int n = uniform_int(rng, 1, max_notes);
  for (int i = 0; i < n; ++i) {
    const int onset = uniform_int(rng, 0, S - 1);
    const int dur = uniform_int(rng, 1, S - onset);
    c.notes.push_back({onset, dur, uniform_int(rng, lo, hi)});
  }
  std::sort(c.notes.begin(), c.notes.end());
  return c;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("motif_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace motif::testing
