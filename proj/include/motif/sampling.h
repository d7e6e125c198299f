#pragma once

#include <string>
#include <vector>

#include "motif/augment.h"
#include "motif/errors.h"
#include "motif/rng.h"
#include "motif/types.h"

namespace motif {

struct Provenance {
  std::string song_id;
  std::string origin_id;

  bool operator==(const Provenance&) const = default;
};

/// Batches point into the corpus they were drawn from; the corpus must outlive them.
struct PairBatch {
  std::vector<const PianoRollChunk*> anchors;
  std::vector<const PianoRollChunk*> positives;
  std::vector<Provenance> provenance;

  size_t size() const { return anchors.size(); }
};

struct TripletBatch {
  std::vector<const PianoRollChunk*> anchors;
  std::vector<const PianoRollChunk*> positives;
  std::vector<const PianoRollChunk*> negatives;
  std::vector<Provenance> anchor_provenance;
  std::vector<Provenance> positive_provenance;
  std::vector<Provenance> negative_provenance;

  size_t size() const { return anchors.size(); }
};

inline constexpr double kNeclOverlapThreshold = 0.5;

/// Intersection over union of the active raster cells of two chunks.
double raster_iou(const PianoRollChunk& a, const PianoRollChunk& b);

/// Drops candidates whose IoU with the anchor exceeds 0.5. If that would drop every
/// candidate, the unfiltered list is returned and a warning is emitted.
std::vector<PianoRollChunk> necl_filter(const PianoRollChunk& anchor, const std::vector<PianoRollChunk>& candidates,
                                        Warnings* warnings = nullptr);
/// Index form of necl_filter: positions of the kept candidates.
std::vector<size_t> necl_keep(const PianoRollChunk& anchor, const std::vector<const PianoRollChunk*>& candidates,
                              Warnings* warnings = nullptr);

struct NegativeOptions {
  bool necl = false;
  int candidate_pool = 16;  // cross-song candidates drawn before the NECL filter
};

struct LabeledView {
  const std::vector<PianoRollChunk>* chunks = nullptr;
  const std::vector<MotifLabel>* labels = nullptr;
};

/// Draw protocol: n distinct set indices by partial Fisher-Yates (step i swaps i with
/// i + uniform_index(N - i)); then per pair, anchor view a = uniform_index(m) and
/// positive p = uniform_index(m - 1), bumped by one when p >= a (both 0 when m = 1).
PairBatch sample_pair_batch(const std::vector<ViewSet>& corpus, int n, Rng& rng);

/// Pairs of distinct chunks sharing a (song_id, motif_id) label. Anchors are drawn by
/// partial Fisher-Yates over the chunks whose motif has at least two occurrences.
PairBatch sample_pair_batch(const LabeledView& data, int n, Rng& rng);

/// Pretrain mode: positive is another view of the anchor's set. Anchors are drawn as in
/// sample_pair_batch (with replacement via uniform_index when n exceeds the corpus).
/// Each negative is found by rejection: uniform_index over all views until the song differs.
TripletBatch sample_triplet_batch(const std::vector<ViewSet>& corpus, int n, Rng& rng,
                                  const NegativeOptions& negatives = {}, Warnings* warnings = nullptr);

/// Fine-tune mode: positive is another chunk with the anchor's (song_id, motif_id);
/// negatives come from any chunk of a different song.
TripletBatch sample_triplet_batch(const LabeledView& data, int n, Rng& rng, const NegativeOptions& negatives = {},
                                  Warnings* warnings = nullptr);

}  // namespace motif
