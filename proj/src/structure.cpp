#include "motif/structure.h"

#include <algorithm>

#include "motif/dataset_io.h"

namespace motif {

const std::vector<std::string>& motif_palette() {
  static const std::vector<std::string> kPalette{"#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4",
                                                 "#f032e6", "#bfef45", "#469990", "#9a6324", "#800000", "#000075"};
  return kPalette;
}

StructureMap structure_map(const Mat& embeddings, const ClusterAssignment& assignment) {
  if (assignment.labels.size() != static_cast<size_t>(embeddings.rows())) {
    throw DomainError("structure_map: assignment covers " + std::to_string(assignment.labels.size()) +
                      " chunks but there are " + std::to_string(embeddings.rows()) + " embeddings");
  }
  StructureMap map;
  const int m = assignment.cluster_count();
  map.distances.resize(m, embeddings.rows());
  for (int c = 0; c < m; ++c) {
    for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
      map.distances(c, i) = (embeddings.row(i).transpose() - assignment.centers[c]).norm();
    }
    map.colors.push_back(motif_palette()[static_cast<size_t>(c) % motif_palette().size()]);
  }
  map.chunk_clusters = assignment.labels;
  return map;
}

Mat row_normalized(const Mat& distances) {
  Mat out = distances;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double lo = out.row(r).minCoeff();
    const double hi = out.row(r).maxCoeff();
    if (hi > lo) {
      out.row(r) = (out.row(r).array() - lo) / (hi - lo);
    } else {
      out.row(r).setZero();
    }
  }
  return out;
}

nlohmann::json structure_to_json(const StructureMap& map) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < map.distances.rows(); ++r) {
    std::vector<double> row(map.distances.cols());
    for (Eigen::Index c = 0; c < map.distances.cols(); ++c) row[c] = map.distances(r, c);
    rows.push_back(row);
  }
  nlohmann::json color_map = nlohmann::json::object();
  for (size_t c = 0; c < map.colors.size(); ++c) color_map[std::to_string(c)] = map.colors[c];
  return {{"n_clusters", map.distances.rows()},
          {"n_chunks", map.chunk_clusters.size()},
          {"distances", rows},
          {"chunk_clusters", map.chunk_clusters},
          {"colors", color_map},
          {"noise_color", kNoiseColor}};
}

StructureMap structure_from_json(const nlohmann::json& j) {
  StructureMap map;
  const auto n_clusters = j.at("n_clusters").get<Eigen::Index>();
  const auto n_chunks = j.at("n_chunks").get<Eigen::Index>();
  map.chunk_clusters = j.at("chunk_clusters").get<std::vector<int>>();
  map.distances.resize(n_clusters, n_chunks);
  const auto& rows = j.at("distances");
  if (static_cast<Eigen::Index>(rows.size()) != n_clusters) throw DomainError("structure sidecar: row count mismatch");
  for (Eigen::Index r = 0; r < n_clusters; ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != n_chunks) throw DomainError("structure sidecar: column count mismatch");
    for (Eigen::Index c = 0; c < n_chunks; ++c) map.distances(r, c) = row[c];
  }
  for (Eigen::Index c = 0; c < n_clusters; ++c) map.colors.push_back(j.at("colors").at(std::to_string(c)).get<std::string>());
  return map;
}

RenderedFiles render_outputs(const StructureMap& map, const std::vector<PianoRollChunk>& chunks,
                             const ClusterAssignment& assignment, const std::filesystem::path& out_dir,
                             const RenderOptions& options, Warnings* warnings) {
  if (chunks.size() != map.chunk_clusters.size()) {
    throw DomainError("render_outputs: " + std::to_string(chunks.size()) + " chunks but the map covers " +
                      std::to_string(map.chunk_clusters.size()));
  }
  std::filesystem::create_directories(out_dir);
  RenderedFiles files;

  files.sidecar = out_dir / "structure.json";
  nlohmann::json sidecar = structure_to_json(map);
  sidecar["eps"] = assignment.eps;
  nlohmann::json bar_ids = nlohmann::json::array();
  for (const auto& c : chunks) bar_ids.push_back(c.bar_index);
  sidecar["bar_index"] = bar_ids;
  sidecar["row_normalized"] = options.row_normalize;
  write_json(files.sidecar, sidecar);

  if (map.distances.rows() == 0) {
    warn(warnings, "no motif clusters found; heatmap skipped");
  } else {
    const Mat shown = options.row_normalize ? row_normalized(map.distances) : map.distances;
    const double lo = shown.minCoeff();
    const double hi = shown.maxCoeff();
    const int cell = options.cell_px;
    Image heat(static_cast<int>(shown.cols()) * cell, static_cast<int>(shown.rows()) * cell);
    for (Eigen::Index r = 0; r < shown.rows(); ++r) {
      for (Eigen::Index c = 0; c < shown.cols(); ++c) {
        // Small distances render bright: closeness to a motif is what the figure shows.
        const double t = hi > lo ? (shown(r, c) - lo) / (hi - lo) : 0.0;
        heat.fill_rect(static_cast<int>(c) * cell, static_cast<int>(r) * cell, cell, cell, colormap(1.0 - t));
      }
    }
    files.heatmap = out_dir / "heatmap.png";
    write_png(files.heatmap, heat);
  }

  int low = 127, high = 0, first_bar = 0, last_bar = 0, steps = 16;
  bool any = false;
  for (const auto& c : chunks) {
    if (!any) first_bar = last_bar = c.bar_index;
    steps = c.steps_per_bar;
    first_bar = std::min(first_bar, c.bar_index);
    last_bar = std::max(last_bar, c.bar_index);
    for (const auto& n : c.notes) {
      low = std::min(low, n.pitch);
      high = std::max(high, n.pitch);
      any = true;
    }
  }
  if (!any) {
    low = 60;
    high = 60;
  }
  const int bars = last_bar - first_bar + 1;
  const int width = std::max(1, bars * steps * options.step_px);
  const int height = (high - low + 1) * options.pitch_px;
  Image roll(width, height);
  for (int b = 0; b <= bars; ++b) roll.fill_rect(b * steps * options.step_px, 0, 1, height, {220, 220, 220});
  const Rgb noise = rgb_from_hex(kNoiseColor);
  for (size_t i = 0; i < chunks.size(); ++i) {
    const int cluster = map.chunk_clusters[i];
    const Rgb color = cluster == kNoise ? noise : rgb_from_hex(map.colors[static_cast<size_t>(cluster)]);
    const int x0 = (chunks[i].bar_index - first_bar) * steps * options.step_px;
    for (const auto& n : chunks[i].notes) {
      roll.fill_rect(x0 + n.onset_step * options.step_px, (high - n.pitch) * options.pitch_px,
                     std::max(1, n.duration_steps * options.step_px - 1), options.pitch_px, color);
    }
  }
  files.colored_roll = out_dir / "colored_roll.png";
  write_png(files.colored_roll, roll);
  return files;
}

}  // namespace motif
