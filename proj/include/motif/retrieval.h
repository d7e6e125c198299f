#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "motif/encoder.h"
#include "motif/types.h"

namespace motif {

struct EmbeddedCorpus {
  Mat vectors;                                   // one row per item
  std::vector<std::optional<std::string>> keys;  // relevance key, or unlabeled
  std::vector<std::string> item_ids;

  size_t size() const { return keys.size(); }
};

/// Relevance = shared origin_id (synthetic suite).
std::vector<std::optional<std::string>> keys_by_origin(const std::vector<PianoRollChunk>& chunks);
/// Relevance = shared (song_id, motif_id); chunks without a label stay unlabeled.
std::vector<std::optional<std::string>> keys_by_label(const std::vector<PianoRollChunk>& chunks,
                                                      const std::vector<MotifLabel>& labels);

EmbeddedCorpus embed_corpus(const std::vector<PianoRollChunk>& chunks, const Model& model,
                            std::vector<std::optional<std::string>> keys);
/// Interval-based piano rolls: ibpr_normalize, rasterize, flatten (128 * S values, pitch-major).
EmbeddedCorpus embed_corpus_ibpr(const std::vector<PianoRollChunk>& chunks, std::vector<std::optional<std::string>> keys);
/// Standard normal vectors, a chance-level reference.
EmbeddedCorpus embed_corpus_random(const std::vector<PianoRollChunk>& chunks, int dim, uint64_t seed,
                                   std::vector<std::optional<std::string>> keys);

struct RetrievalReport {
  std::vector<int> k_values;
  std::vector<double> mean_precision;
  std::vector<double> mean_recall;
  double auc_pr = 0.0;
  int n_anchors = 0;
  bool degenerate = false;  // every pairwise distance equal: ranking is the index tie-break

  bool operator==(const RetrievalReport&) const = default;
};

/// Trapezoidal area under the (recall, precision) polyline in K order, extended
/// horizontally from the first point to recall 0.
double auc_pr(const std::vector<double>& recall, const std::vector<double>& precision);

/// Anchors are items whose key is shared by at least one other item. Each anchor ranks
/// every other item by Euclidean distance, ties by item index. Default K sweep is
/// 1 .. largest relevant-set size.
RetrievalReport retrieval_pr(const EmbeddedCorpus& corpus, std::optional<std::vector<int>> k_values = std::nullopt);

nlohmann::json report_to_json(const RetrievalReport& r);
RetrievalReport report_from_json(const nlohmann::json& j);
void write_curve_csv(const std::filesystem::path& path, const RetrievalReport& r);

}  // namespace motif
