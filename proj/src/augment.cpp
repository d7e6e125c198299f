#include "motif/augment.h"

#include <algorithm>
#include <cmath>

#include "motif/errors.h"

namespace motif {
namespace {

void require_notes(const PianoRollChunk& chunk, const char* op) {
  if (chunk.notes.empty()) throw DomainError(std::string(op) + ": chunk " + chunk.origin_id + " has no notes");
}

}  // namespace

void AugmentConfig::validate() const {
  auto probability = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("augment.") + name + " must lie in [0, 1]");
  };
  probability(dropout_p, "dropout_p");
  probability(shift_p, "shift_p");
  probability(include_p, "include_p");
  if (transpose_min > transpose_max) throw ConfigError("augment.transpose_range is empty");
  if (!(duration_factor_min > 0.0 && duration_factor_min <= duration_factor_max)) {
    throw ConfigError("augment.duration_factor_range must be positive and ordered");
  }
  if (n_views < 0) throw ConfigError("augment.n_views must be nonnegative");
}

PianoRollChunk transpose(const PianoRollChunk& chunk, int semitones) {
  PianoRollChunk out = chunk;
  for (auto& n : out.notes) {
    n.pitch += semitones;
    if (n.pitch < 0 || n.pitch > 127) {
      throw DomainError("transpose by " + std::to_string(semitones) + " leaves the MIDI range");
    }
  }
  return out;
}

std::vector<int> feasible_transpositions(const PianoRollChunk& chunk, int lo, int hi) {
  int low = 127, high = 0;
  for (const auto& n : chunk.notes) {
    low = std::min(low, n.pitch);
    high = std::max(high, n.pitch);
  }
  std::vector<int> out;
  for (int k = lo; k <= hi; ++k) {
    if (k != 0 && low + k >= 0 && high + k <= 127) out.push_back(k);
  }
  return out;
}

int sample_transposition(const PianoRollChunk& chunk, int lo, int hi, Rng& rng) {
  const auto candidates = feasible_transpositions(chunk, lo, hi);
  if (candidates.empty()) {
    throw SamplingError("no feasible transposition in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] for chunk " + chunk.origin_id);
  }
  return candidates[uniform_index(rng, candidates.size())];
}

PianoRollChunk dropout(const PianoRollChunk& chunk, double p, Rng& rng) {
  require_notes(chunk, "dropout");
  PianoRollChunk out = chunk;
  out.notes.clear();
  for (const auto& n : chunk.notes) {
    if (!bernoulli(rng, p)) out.notes.push_back(n);
  }
  if (out.notes.empty()) out.notes.push_back(chunk.notes[uniform_index(rng, chunk.notes.size())]);
  return out;
}

PianoRollChunk shift_notes(const PianoRollChunk& chunk, double shift_p, Rng& rng) {
  require_notes(chunk, "shift_notes");
  PianoRollChunk out = chunk;
  const int steps = chunk.steps_per_bar;
  for (auto& n : out.notes) {
    if (!bernoulli(rng, shift_p)) continue;
    const int direction = uniform01(rng) < 0.5 ? -1 : 1;
    n.onset_step = std::clamp(n.onset_step + direction, 0, steps - 1);
    n.duration_steps = std::min(n.duration_steps, steps - n.onset_step);
  }
  std::sort(out.notes.begin(), out.notes.end());
  return out;
}

PianoRollChunk scale_last_duration(const PianoRollChunk& chunk, double factor) {
  require_notes(chunk, "vary_last_duration");
  PianoRollChunk out = chunk;
  int last_onset = 0;
  for (const auto& n : out.notes) last_onset = std::max(last_onset, n.onset_step);
  for (auto& n : out.notes) {
    if (n.onset_step != last_onset) continue;
    const long scaled = std::max<long>(1, std::lround(n.duration_steps * factor));
    n.duration_steps = static_cast<int>(std::min<long>(scaled, chunk.steps_per_bar - n.onset_step));
  }
  return out;
}

PianoRollChunk vary_last_duration(const PianoRollChunk& chunk, double factor_lo, double factor_hi, Rng& rng) {
  return scale_last_duration(chunk, uniform_real(rng, factor_lo, factor_hi));
}

ViewSet make_views(const PianoRollChunk& chunk, const AugmentConfig& cfg) {
  cfg.validate();
  require_notes(chunk, "make_views");
  ViewSet set;
  set.origin_id = chunk.origin_id;
  set.views.reserve(cfg.n_views + 1);
  set.views.push_back(chunk);
  for (int v = 1; v <= cfg.n_views; ++v) {
    Rng rng = derive_stream(cfg.seed, chunk.origin_id, static_cast<uint64_t>(v));
    bool use[4];
    for (bool& u : use) u = bernoulli(rng, cfg.include_p);
    if (!(use[0] || use[1] || use[2] || use[3])) use[uniform_index(rng, 4)] = true;

    PianoRollChunk view = chunk;
    if (use[0]) {
      // Chunks spanning the whole keyboard have no feasible shift; they keep their pitches.
      const auto candidates = feasible_transpositions(view, cfg.transpose_min, cfg.transpose_max);
      if (!candidates.empty()) view = transpose(view, candidates[uniform_index(rng, candidates.size())]);
    }
    if (use[1]) view = dropout(view, cfg.dropout_p, rng);
    if (use[2]) view = shift_notes(view, cfg.shift_p, rng);
    if (use[3]) view = vary_last_duration(view, cfg.duration_factor_min, cfg.duration_factor_max, rng);
    set.views.push_back(std::move(view));
  }
  return set;
}

std::vector<ViewSet> make_view_corpus(const std::vector<PianoRollChunk>& chunks, const AugmentConfig& cfg) {
  std::vector<ViewSet> corpus;
  corpus.reserve(chunks.size());
  for (const auto& c : chunks) {
    if (!c.notes.empty()) corpus.push_back(make_views(c, cfg));
  }
  return corpus;
}

}  // namespace motif
