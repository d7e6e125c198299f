#pragma once

#include <set>
#include <vector>

#include "motif/errors.h"
#include "motif/types.h"

namespace motif {

inline constexpr int kDefaultStepsPerBar = 16;
inline constexpr double kLabelCoverageThreshold = 0.75;

/// Splits a song into one chunk per non-empty bar. Onsets snap to the nearest step,
/// durations round to at least one step, and notes are cut at the end of their onset bar.
std::vector<PianoRollChunk> chunk_song(const Song& song, const std::set<TrackRole>& roles,
                                       int steps_per_bar = kDefaultStepsPerBar);

PianoRoll rasterize(const PianoRollChunk& chunk);

/// Labels a chunk with the pitch of the label note covering strictly more than 75% of its bar.
/// Ties at equal coverage go to the lower pitch.
std::vector<MotifLabel> match_labels(const std::vector<PianoRollChunk>& chunks, const std::vector<NoteEvent>& label_track,
                                     int beats_per_bar = 4, Warnings* warnings = nullptr);

/// Shifts every pitch down so the lowest note sits at pitch 0.
PianoRollChunk ibpr_normalize(const PianoRollChunk& chunk);

/// Mean distinct motifs per song and mean occurrences per motif, recomputed from labels.
DatasetSummary summarize_labels(const std::vector<MotifLabel>& labels);

/// Chunks plus matched labels for every song, using its LABEL-role tracks.
LabeledDataset build_labeled_dataset(const std::vector<Song>& songs, const std::set<TrackRole>& roles,
                                     int steps_per_bar = kDefaultStepsPerBar, Warnings* warnings = nullptr);

}  // namespace motif
