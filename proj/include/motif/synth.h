#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "motif/augment.h"
#include "motif/types.h"

namespace motif {

/// Pop-style accompaniment bars (arpeggios, block chords, broken patterns over a chord
/// progression), grouped into songs of bars_per_song bars.
struct PretrainFixtureConfig {
  int n_origins = 50;
  int bars_per_song = 8;
  int steps_per_bar = 16;
  std::string song_prefix = "syn";
  uint64_t seed = 0;
};

std::vector<Song> synth_pretrain_songs(const PretrainFixtureConfig& cfg);

/// Songs whose accompaniment plants a few motifs, each repeated as transformed
/// occurrences (transposition, dropout, shift, last-duration change) among filler bars.
/// A LABEL track marks every occurrence with a whole-bar note whose pitch is the motif id.
struct LabeledFixtureConfig {
  int n_songs = 20;
  int min_motifs = 3;
  int max_motifs = 6;
  int min_occurrences = 3;
  int max_occurrences = 8;
  int filler_bars = 6;
  int steps_per_bar = 16;
  std::string song_prefix = "lab";
  uint64_t seed = 0;
};

std::vector<Song> synth_labeled_songs(const LabeledFixtureConfig& cfg);

/// Accompaniment chunks of the given songs. Synthetic notes sit on the step grid, so
/// chunking reproduces the generated bars exactly.
std::vector<PianoRollChunk> chunk_synthetic(const std::vector<Song>& songs, int steps_per_bar = 16);

}  // namespace motif
