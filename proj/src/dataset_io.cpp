#include "motif/dataset_io.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "motif/errors.h"

namespace motif {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

template <class T, class F>
std::vector<T> read_lines(const std::filesystem::path& path, F&& parse) {
  auto in = open_in(path);
  std::vector<T> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

json label_to_json(const MotifLabel& l) {
  return json{{"song_id", l.song_id}, {"bar_index", l.bar_index}, {"motif_id", l.motif_id}};
}

MotifLabel label_from_json(const json& j) {
  return {j.at("song_id").get<std::string>(), j.at("bar_index").get<int>(), j.at("motif_id").get<int>()};
}

}  // namespace

json chunk_to_json(const PianoRollChunk& chunk) {
  json notes = json::array();
  for (const auto& n : chunk.notes) notes.push_back({n.onset_step, n.duration_steps, n.pitch});
  return json{{"song_id", chunk.song_id},
              {"bar_index", chunk.bar_index},
              {"S", chunk.steps_per_bar},
              {"notes", notes},
              {"origin_id", chunk.origin_id}};
}

PianoRollChunk chunk_from_json(const json& j) {
  PianoRollChunk c;
  c.song_id = j.at("song_id").get<std::string>();
  c.bar_index = j.at("bar_index").get<int>();
  c.steps_per_bar = j.at("S").get<int>();
  c.origin_id = j.at("origin_id").get<std::string>();
  for (const auto& n : j.at("notes")) {
    if (!n.is_array() || n.size() != 3) throw DomainError("note must be [onset_step, duration_steps, pitch]");
    c.notes.push_back({n[0].get<int>(), n[1].get<int>(), n[2].get<int>()});
  }
  validate_chunk(c);
  return c;
}

void write_chunks_jsonl(const std::filesystem::path& path, const std::vector<PianoRollChunk>& chunks) {
  auto out = open_out(path);
  for (const auto& c : chunks) out << chunk_to_json(c).dump() << "\n";
}

std::vector<PianoRollChunk> read_chunks_jsonl(const std::filesystem::path& path) {
  return read_lines<PianoRollChunk>(path, chunk_from_json);
}

void write_labels_jsonl(const std::filesystem::path& path, const std::vector<MotifLabel>& labels) {
  auto out = open_out(path);
  for (const auto& l : labels) out << label_to_json(l).dump() << "\n";
}

std::vector<MotifLabel> read_labels_jsonl(const std::filesystem::path& path) {
  return read_lines<MotifLabel>(path, label_from_json);
}

std::vector<MotifLabel> read_labels_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<MotifLabel> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string song, bar, motif_id;
    if (!std::getline(ss, song, ',') || !std::getline(ss, bar, ',') || !std::getline(ss, motif_id, ',')) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    if (line_no == 1 && song == "song_id") continue;
    try {
      out.push_back({song, std::stoi(bar), std::stoi(motif_id)});
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": non-integer bar_index or motif_id");
    }
  }
  return out;
}

void write_viewsets_jsonl(const std::filesystem::path& path, const std::vector<ViewSet>& sets) {
  auto out = open_out(path);
  for (const auto& s : sets) {
    json views = json::array();
    for (const auto& v : s.views) views.push_back(chunk_to_json(v));
    out << json{{"origin_id", s.origin_id}, {"views", views}}.dump() << "\n";
  }
}

std::vector<ViewSet> read_viewsets_jsonl(const std::filesystem::path& path) {
  return read_lines<ViewSet>(path, [](const json& j) {
    ViewSet s;
    s.origin_id = j.at("origin_id").get<std::string>();
    for (const auto& v : j.at("views")) s.views.push_back(chunk_from_json(v));
    if (s.views.empty()) throw DomainError("view set " + s.origin_id + " has no views");
    return s;
  });
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace motif
