#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "motif/errors.h"
#include "motif/types.h"

namespace motif {

struct MidiParseOptions {
  std::string song_id;
  /// Exact (case-insensitive) track-name overrides, applied before the name convention.
  std::map<std::string, TrackRole> role_by_name;
  TrackRole default_role = TrackRole::Accompaniment;
};

/// Name convention: *MELODY* and *BRIDGE* -> melody, *LABEL* and *MOTIF* -> label,
/// anything else -> options.default_role.
TrackRole assign_role(const std::string& track_name, const MidiParseOptions& options);

/// Parses a Standard MIDI File. Timing is in quarter-note beats (tick / division).
/// Tracks without notes are dropped. 4/4 is assumed when no time signature is present.
Song parse_midi(std::span<const uint8_t> bytes, const MidiParseOptions& options = {}, Warnings* warnings = nullptr);

Song parse_midi_file(const std::filesystem::path& path, MidiParseOptions options = {}, Warnings* warnings = nullptr);

/// Format-1 writer: a conductor track carrying the time signature, then one named track per Song track.
std::vector<uint8_t> write_midi(const Song& song, int ticks_per_beat = 480);

}  // namespace motif
