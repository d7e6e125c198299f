#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "motif/types.h"

namespace motif {

nlohmann::json chunk_to_json(const PianoRollChunk& chunk);
PianoRollChunk chunk_from_json(const nlohmann::json& j);

void write_chunks_jsonl(const std::filesystem::path& path, const std::vector<PianoRollChunk>& chunks);
std::vector<PianoRollChunk> read_chunks_jsonl(const std::filesystem::path& path);

void write_labels_jsonl(const std::filesystem::path& path, const std::vector<MotifLabel>& labels);
std::vector<MotifLabel> read_labels_jsonl(const std::filesystem::path& path);

/// Columns song_id,bar_index,motif_id; a header row is optional.
std::vector<MotifLabel> read_labels_csv(const std::filesystem::path& path);

void write_viewsets_jsonl(const std::filesystem::path& path, const std::vector<ViewSet>& sets);
std::vector<ViewSet> read_viewsets_jsonl(const std::filesystem::path& path);

/// Writes JSON with a trailing newline; keys come out sorted so output is stable.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace motif
