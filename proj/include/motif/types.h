#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace motif {

enum class TrackRole { Melody, Accompaniment, Label };

const char* role_name(TrackRole role);
TrackRole role_from_name(const std::string& name);

/// A note on the beat timeline of a song.
struct NoteEvent {
  double onset_beats = 0.0;
  double duration_beats = 1.0;
  int pitch = 60;
  std::optional<int> velocity;
  std::string track_id;

  bool operator==(const NoteEvent&) const = default;
};

struct Track {
  TrackRole role = TrackRole::Accompaniment;
  std::string name;
  std::vector<NoteEvent> notes;  // sorted by onset
};

struct Song {
  std::string song_id;
  int beats_per_bar = 4;
  std::vector<Track> tracks;

  std::vector<NoteEvent> notes_with_role(TrackRole role) const;
};

/// One note inside a bar, on the step grid.
struct ChunkNote {
  int onset_step = 0;
  int duration_steps = 1;
  int pitch = 60;

  auto operator<=>(const ChunkNote&) const = default;
};

/// One bar of music: the unit sample fed to the encoder.
struct PianoRollChunk {
  std::string song_id;
  int bar_index = 0;
  int steps_per_bar = 16;
  std::vector<ChunkNote> notes;
  std::string origin_id;

  bool operator==(const PianoRollChunk&) const = default;
};

std::string make_origin_id(const std::string& song_id, int bar_index);

/// Throws DomainError if any note leaves the bar or the pitch range.
void validate_chunk(const PianoRollChunk& chunk);

/// Binary 128 x S grid, row-major by pitch.
class PianoRoll {
 public:
  static constexpr int kPitches = 128;

  explicit PianoRoll(int steps) : steps_(steps), cells_(static_cast<size_t>(kPitches) * steps, 0) {}

  int steps() const { return steps_; }
  uint8_t at(int pitch, int step) const { return cells_[index(pitch, step)]; }
  void set(int pitch, int step) { cells_[index(pitch, step)] = 1; }
  int active_cells() const;
  const std::vector<uint8_t>& cells() const { return cells_; }

 private:
  size_t index(int pitch, int step) const { return static_cast<size_t>(pitch) * steps_ + step; }

  int steps_;
  std::vector<uint8_t> cells_;
};

struct MotifLabel {
  std::string song_id;
  int bar_index = 0;
  int motif_id = 0;

  bool operator==(const MotifLabel&) const = default;
};

struct DatasetSummary {
  double mean_motifs_per_song = 0.0;
  double mean_occurrences_per_motif = 0.0;
};

struct LabeledDataset {
  std::vector<PianoRollChunk> chunks;
  std::vector<MotifLabel> labels;
  DatasetSummary summary;
};

/// Augmented views of one source chunk; views[0] is the original.
struct ViewSet {
  std::string origin_id;
  std::vector<PianoRollChunk> views;

  bool operator==(const ViewSet&) const = default;
};

}  // namespace motif
