#include "motif/chunking.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace motif {

std::vector<PianoRollChunk> chunk_song(const Song& song, const std::set<TrackRole>& roles, int steps_per_bar) {
  if (steps_per_bar <= 0) throw ConfigError("steps_per_bar must be positive, got " + std::to_string(steps_per_bar));
  if (song.beats_per_bar <= 0) throw ConfigError("song " + song.song_id + " has no positive beats_per_bar");

  const double steps_per_beat = static_cast<double>(steps_per_bar) / song.beats_per_bar;
  std::map<int, std::vector<ChunkNote>> bars;
  for (const auto& track : song.tracks) {
    if (!roles.contains(track.role)) continue;
    for (const auto& note : track.notes) {
      const long global_step = std::lround(note.onset_beats * steps_per_beat);
      const int bar = static_cast<int>(global_step / steps_per_bar);
      const int onset = static_cast<int>(global_step % steps_per_bar);
      const long rounded = std::lround(note.duration_beats * steps_per_beat);
      const int duration = static_cast<int>(std::min<long>(std::max<long>(rounded, 1), steps_per_bar - onset));
      bars[bar].push_back({onset, duration, note.pitch});
    }
  }

  std::vector<PianoRollChunk> chunks;
  chunks.reserve(bars.size());
  for (auto& [bar, notes] : bars) {
    std::sort(notes.begin(), notes.end());
    PianoRollChunk chunk;
    chunk.song_id = song.song_id;
    chunk.bar_index = bar;
    chunk.steps_per_bar = steps_per_bar;
    chunk.notes = std::move(notes);
    chunk.origin_id = make_origin_id(song.song_id, bar);
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

PianoRoll rasterize(const PianoRollChunk& chunk) {
  PianoRoll roll(chunk.steps_per_bar);
  for (const auto& n : chunk.notes) {
    for (int t = n.onset_step; t < n.onset_step + n.duration_steps; ++t) roll.set(n.pitch, t);
  }
  return roll;
}

std::vector<MotifLabel> match_labels(const std::vector<PianoRollChunk>& chunks, const std::vector<NoteEvent>& label_track,
                                     int beats_per_bar, Warnings* warnings) {
  if (beats_per_bar <= 0) throw ConfigError("beats_per_bar must be positive");
  std::vector<MotifLabel> labels;
  for (const auto& chunk : chunks) {
    const double start = static_cast<double>(chunk.bar_index) * beats_per_bar;
    const double end = start + beats_per_bar;

    std::vector<const NoteEvent*> touching;
    double best = 0.0;
    int best_pitch = -1;
    for (const auto& note : label_track) {
      const double overlap =
          std::min(end, note.onset_beats + note.duration_beats) - std::max(start, note.onset_beats);
      if (overlap <= 0.0) continue;
      touching.push_back(&note);
      const double coverage = overlap / beats_per_bar;
      if (coverage > best || (coverage == best && note.pitch < best_pitch)) {
        best = coverage;
        best_pitch = note.pitch;
      }
    }

    for (size_t i = 0; i < touching.size(); ++i) {
      for (size_t j = i + 1; j < touching.size(); ++j) {
        const NoteEvent& a = *touching[i];
        const NoteEvent& b = *touching[j];
        const bool overlapping = a.onset_beats < b.onset_beats + b.duration_beats &&
                                 b.onset_beats < a.onset_beats + a.duration_beats;
        if (overlapping && a.pitch != b.pitch) {
          warn(warnings, "chunk " + chunk.origin_id + ": overlapping label notes " + std::to_string(a.pitch) + " and " +
                             std::to_string(b.pitch));
        }
      }
    }

    if (best > kLabelCoverageThreshold) labels.push_back({chunk.song_id, chunk.bar_index, best_pitch});
  }
  return labels;
}

PianoRollChunk ibpr_normalize(const PianoRollChunk& chunk) {
  if (chunk.notes.empty()) throw DomainError("ibpr_normalize: chunk " + chunk.origin_id + " has no notes");
  int lowest = 127;
  for (const auto& n : chunk.notes) lowest = std::min(lowest, n.pitch);
  PianoRollChunk out = chunk;
  for (auto& n : out.notes) n.pitch -= lowest;
  return out;
}

DatasetSummary summarize_labels(const std::vector<MotifLabel>& labels) {
  std::map<std::string, std::map<int, int>> per_song;
  for (const auto& l : labels) ++per_song[l.song_id][l.motif_id];
  size_t motifs = 0;
  size_t occurrences = 0;
  for (const auto& [song, motif_counts] : per_song) {
    motifs += motif_counts.size();
    for (const auto& [id, count] : motif_counts) occurrences += count;
  }
  DatasetSummary summary;
  if (!per_song.empty()) summary.mean_motifs_per_song = static_cast<double>(motifs) / per_song.size();
  if (motifs > 0) summary.mean_occurrences_per_motif = static_cast<double>(occurrences) / motifs;
  return summary;
}

LabeledDataset build_labeled_dataset(const std::vector<Song>& songs, const std::set<TrackRole>& roles,
                                     int steps_per_bar, Warnings* warnings) {
  LabeledDataset dataset;
  for (const auto& song : songs) {
    auto chunks = chunk_song(song, roles, steps_per_bar);
    const auto label_notes = song.notes_with_role(TrackRole::Label);
    if (!label_notes.empty()) {
      auto labels = match_labels(chunks, label_notes, song.beats_per_bar, warnings);
      dataset.labels.insert(dataset.labels.end(), labels.begin(), labels.end());
    }
    dataset.chunks.insert(dataset.chunks.end(), std::make_move_iterator(chunks.begin()),
                          std::make_move_iterator(chunks.end()));
  }
  dataset.summary = summarize_labels(dataset.labels);
  return dataset;
}

}  // namespace motif
