#pragma once

#include <cstdint>
#include <vector>

#include "motif/rng.h"
#include "motif/types.h"

namespace motif {

struct AugmentConfig {
  int transpose_min = -12;
  int transpose_max = 12;
  double dropout_p = 0.1;
  double shift_p = 0.2;
  double duration_factor_min = 0.5;
  double duration_factor_max = 2.0;
  double include_p = 0.5;
  int n_views = 5;
  uint64_t seed = 0;

  void validate() const;
};

PianoRollChunk transpose(const PianoRollChunk& chunk, int semitones);

/// Nonzero shifts in [lo, hi] that keep every pitch inside [0, 127].
std::vector<int> feasible_transpositions(const PianoRollChunk& chunk, int lo, int hi);

/// Uniform draw from the feasible set; SamplingError when it is empty.
int sample_transposition(const PianoRollChunk& chunk, int lo, int hi, Rng& rng);

/// One bernoulli(p) draw per note in order; a hit drops the note. If every note was
/// dropped, one uniform_index(n) draw picks the survivor.
PianoRollChunk dropout(const PianoRollChunk& chunk, double p, Rng& rng);

/// Per note in order: bernoulli(shift_p) selects it, then a uniform01 draw < 0.5 moves
/// the onset one step earlier, otherwise one step later. Onsets clamp to [0, S-1] and
/// durations shrink only when the bar end requires it.
PianoRollChunk shift_notes(const PianoRollChunk& chunk, double shift_p, Rng& rng);

/// Multiplies the durations of the notes at the latest onset by factor, rounding to
/// at least one step and clamping at the bar end.
PianoRollChunk scale_last_duration(const PianoRollChunk& chunk, double factor);

/// scale_last_duration with factor ~ uniform_real(lo, hi).
PianoRollChunk vary_last_duration(const PianoRollChunk& chunk, double factor_lo, double factor_hi, Rng& rng);

/// The original plus cfg.n_views augmented views. View i draws from
/// derive_stream(cfg.seed, origin_id, i): four bernoulli(include_p) inclusion draws
/// (transpose, dropout, shift, duration), a uniform_index(4) forced pick when none hit,
/// then the selected transforms in that fixed order.
ViewSet make_views(const PianoRollChunk& chunk, const AugmentConfig& cfg);

std::vector<ViewSet> make_view_corpus(const std::vector<PianoRollChunk>& chunks, const AugmentConfig& cfg);

}  // namespace motif
