#include "motif/types.h"

#include <algorithm>
#include <cctype>
#include <iostream>

#include "motif/errors.h"

namespace motif {

void warn(Warnings* sink, const std::string& message) {
  if (sink) {
    sink->add(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

const char* role_name(TrackRole role) {
  switch (role) {
    case TrackRole::Melody:
      return "MELODY";
    case TrackRole::Accompaniment:
      return "ACCOMPANIMENT";
    case TrackRole::Label:
      return "LABEL";
  }
  return "ACCOMPANIMENT";
}

TrackRole role_from_name(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == "MELODY") return TrackRole::Melody;
  if (upper == "ACCOMPANIMENT") return TrackRole::Accompaniment;
  if (upper == "LABEL") return TrackRole::Label;
  throw ConfigError("unknown track role '" + name + "'");
}

std::vector<NoteEvent> Song::notes_with_role(TrackRole role) const {
  std::vector<NoteEvent> out;
  for (const auto& track : tracks) {
    if (track.role == role) out.insert(out.end(), track.notes.begin(), track.notes.end());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const NoteEvent& a, const NoteEvent& b) { return a.onset_beats < b.onset_beats; });
  return out;
}

std::string make_origin_id(const std::string& song_id, int bar_index) {
  return song_id + ":" + std::to_string(bar_index);
}

void validate_chunk(const PianoRollChunk& chunk) {
  if (chunk.steps_per_bar <= 0) throw DomainError("chunk " + chunk.origin_id + ": steps_per_bar must be positive");
  for (const auto& n : chunk.notes) {
    if (n.onset_step < 0 || n.onset_step >= chunk.steps_per_bar || n.duration_steps < 1 ||
        n.onset_step + n.duration_steps > chunk.steps_per_bar || n.pitch < 0 || n.pitch > 127) {
      throw DomainError("chunk " + chunk.origin_id + ": note (" + std::to_string(n.onset_step) + ", " +
                        std::to_string(n.duration_steps) + ", " + std::to_string(n.pitch) + ") violates bar bounds");
    }
  }
}

int PianoRoll::active_cells() const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), uint8_t{1}));
}

}  // namespace motif
