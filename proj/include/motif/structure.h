#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "motif/clustering.h"
#include "motif/image.h"
#include "motif/types.h"

namespace motif {

/// Twelve distinguishable colors, cycled when there are more clusters.
const std::vector<std::string>& motif_palette();
inline const std::string kNoiseColor = "#9e9e9e";

struct StructureMap {
  Mat distances;                    // clusters x chunks, chunks in bar order
  std::vector<int> chunk_clusters;  // per chunk: cluster id or kNoise
  std::vector<std::string> colors;  // per cluster

  bool operator==(const StructureMap& other) const {
    return distances.rows() == other.distances.rows() && distances.cols() == other.distances.cols() &&
           distances == other.distances && chunk_clusters == other.chunk_clusters && colors == other.colors;
  }
};

/// Euclidean distance from every chunk embedding (rows, bar order) to every cluster center.
StructureMap structure_map(const Mat& embeddings, const ClusterAssignment& assignment);

/// Each row rescaled to [0, 1] by its own min and max (constant rows become 0).
Mat row_normalized(const Mat& distances);

nlohmann::json structure_to_json(const StructureMap& map);
StructureMap structure_from_json(const nlohmann::json& j);

struct RenderOptions {
  bool row_normalize = false;
  int cell_px = 12;      // heatmap cell edge
  int step_px = 2;       // piano-roll pixels per step
  int pitch_px = 3;      // piano-roll pixels per semitone
};

struct RenderedFiles {
  std::filesystem::path heatmap;  // empty when there are no clusters
  std::filesystem::path colored_roll;
  std::filesystem::path sidecar;
};

/// Writes heatmap.png (one row per motif, one column per chunk), colored_roll.png
/// (notes colored by their chunk's cluster, noise gray) and structure.json.
RenderedFiles render_outputs(const StructureMap& map, const std::vector<PianoRollChunk>& chunks,
                             const ClusterAssignment& assignment, const std::filesystem::path& out_dir,
                             const RenderOptions& options = {}, Warnings* warnings = nullptr);

}  // namespace motif
