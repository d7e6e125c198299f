#include "motif/retrieval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "motif/chunking.h"
#include "motif/errors.h"
#include "motif/rng.h"

namespace motif {

std::vector<std::optional<std::string>> keys_by_origin(const std::vector<PianoRollChunk>& chunks) {
  std::vector<std::optional<std::string>> keys;
  for (const auto& c : chunks) keys.emplace_back(c.origin_id);
  return keys;
}

std::vector<std::optional<std::string>> keys_by_label(const std::vector<PianoRollChunk>& chunks,
                                                      const std::vector<MotifLabel>& labels) {
  std::map<std::pair<std::string, int>, int> motif_of;
  for (const auto& l : labels) motif_of[{l.song_id, l.bar_index}] = l.motif_id;
  std::vector<std::optional<std::string>> keys;
  for (const auto& c : chunks) {
    auto it = motif_of.find({c.song_id, c.bar_index});
    if (it == motif_of.end()) {
      keys.emplace_back(std::nullopt);
    } else {
      keys.emplace_back(c.song_id + "#" + std::to_string(it->second));
    }
  }
  return keys;
}

namespace {

EmbeddedCorpus make_corpus(const std::vector<PianoRollChunk>& chunks, Mat vectors,
                           std::vector<std::optional<std::string>> keys) {
  if (keys.size() != chunks.size()) throw EvaluationError("relevance keys do not match the chunk count");
  EmbeddedCorpus corpus;
  corpus.vectors = std::move(vectors);
  corpus.keys = std::move(keys);
  for (const auto& c : chunks) corpus.item_ids.push_back(c.origin_id);
  return corpus;
}

}  // namespace

EmbeddedCorpus embed_corpus(const std::vector<PianoRollChunk>& chunks, const Model& model,
                            std::vector<std::optional<std::string>> keys) {
  return make_corpus(chunks, model.encode(chunks), std::move(keys));
}

EmbeddedCorpus embed_corpus_ibpr(const std::vector<PianoRollChunk>& chunks, std::vector<std::optional<std::string>> keys) {
  const int steps = chunks.empty() ? kDefaultStepsPerBar : chunks.front().steps_per_bar;
  Mat vectors = Mat::Zero(static_cast<Eigen::Index>(chunks.size()), PianoRoll::kPitches * steps);
  for (size_t i = 0; i < chunks.size(); ++i) {
    if (chunks[i].steps_per_bar != steps) throw EvaluationError("IBPR corpus mixes steps_per_bar values");
    const PianoRoll roll = rasterize(ibpr_normalize(chunks[i]));
    for (size_t c = 0; c < roll.cells().size(); ++c) vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = roll.cells()[c];
  }
  return make_corpus(chunks, std::move(vectors), std::move(keys));
}

EmbeddedCorpus embed_corpus_random(const std::vector<PianoRollChunk>& chunks, int dim, uint64_t seed,
                                   std::vector<std::optional<std::string>> keys) {
  Rng rng = derive_stream(seed, "random-embedding");
  Mat vectors(static_cast<Eigen::Index>(chunks.size()), dim);
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) vectors(i, j) = standard_normal(rng);
  }
  return make_corpus(chunks, std::move(vectors), std::move(keys));
}

double auc_pr(const std::vector<double>& recall, const std::vector<double>& precision) {
  if (recall.size() != precision.size()) throw EvaluationError("auc_pr: curve lengths differ");
  if (recall.empty()) return 0.0;
  double area = recall.front() * precision.front();
  for (size_t i = 1; i < recall.size(); ++i) {
    area += (recall[i] - recall[i - 1]) * 0.5 * (precision[i] + precision[i - 1]);
  }
  return area;
}

RetrievalReport retrieval_pr(const EmbeddedCorpus& corpus, std::optional<std::vector<int>> k_values) {
  const size_t n = corpus.size();
  if (n < 2) throw EvaluationError("retrieval needs at least two items");
  if (static_cast<size_t>(corpus.vectors.rows()) != n) throw EvaluationError("corpus vectors and keys disagree in size");

  std::map<std::string, int> key_count;
  for (const auto& k : corpus.keys) {
    if (k) ++key_count[*k];
  }
  std::vector<size_t> anchors;
  int max_relevant = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!corpus.keys[i]) continue;
    const int relevant = key_count[*corpus.keys[i]] - 1;
    if (relevant >= 1) {
      anchors.push_back(i);
      max_relevant = std::max(max_relevant, relevant);
    }
  }
  if (anchors.empty()) throw EvaluationError("no anchor has a relevant partner");

  RetrievalReport report;
  if (k_values) {
    report.k_values = *k_values;
    for (int k : report.k_values) {
      if (k < 1 || static_cast<size_t>(k) > n - 1) throw EvaluationError("K values must lie in [1, items - 1]");
    }
  } else {
    for (int k = 1; k <= max_relevant; ++k) report.k_values.push_back(k);
  }
  const size_t nk = report.k_values.size();
  std::vector<double> precision_sum(nk, 0.0), recall_sum(nk, 0.0);

  const Eigen::Index dim = corpus.vectors.cols();
  std::vector<std::pair<double, size_t>> ranked;
  std::vector<int> hits_at;
  double first_distance = -1.0;
  bool all_equal = true;
  for (size_t a : anchors) {
    ranked.clear();
    for (size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      double sq = 0.0;
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double diff = corpus.vectors(a, c) - corpus.vectors(j, c);
        sq += diff * diff;
      }
      const double dist = std::sqrt(sq);
      if (first_distance < 0.0) first_distance = dist;
      all_equal = all_equal && dist == first_distance;
      ranked.emplace_back(dist, j);
    }
    std::sort(ranked.begin(), ranked.end());
    const std::string& key = *corpus.keys[a];
    const int total_relevant = key_count[key] - 1;
    hits_at.assign(n, 0);  // hits within the first r ranks
    int hits = 0;
    for (size_t r = 0; r < ranked.size(); ++r) {
      const auto& other = corpus.keys[ranked[r].second];
      if (other && *other == key) ++hits;
      hits_at[r + 1] = hits;
    }
    for (size_t ki = 0; ki < nk; ++ki) {
      const int k = report.k_values[ki];
      precision_sum[ki] += static_cast<double>(hits_at[k]) / k;
      recall_sum[ki] += static_cast<double>(hits_at[k]) / total_relevant;
    }
  }

  const double count = static_cast<double>(anchors.size());
  for (size_t ki = 0; ki < nk; ++ki) {
    report.mean_precision.push_back(precision_sum[ki] / count);
    report.mean_recall.push_back(recall_sum[ki] / count);
  }
  report.auc_pr = auc_pr(report.mean_recall, report.mean_precision);
  report.n_anchors = static_cast<int>(anchors.size());
  report.degenerate = all_equal;
  return report;
}

nlohmann::json report_to_json(const RetrievalReport& r) {
  return {{"k_values", r.k_values},   {"mean_precision", r.mean_precision}, {"mean_recall", r.mean_recall},
          {"auc_pr", r.auc_pr},       {"n_anchors", r.n_anchors},           {"degenerate", r.degenerate}};
}

RetrievalReport report_from_json(const nlohmann::json& j) {
  RetrievalReport r;
  r.k_values = j.at("k_values").get<std::vector<int>>();
  r.mean_precision = j.at("mean_precision").get<std::vector<double>>();
  r.mean_recall = j.at("mean_recall").get<std::vector<double>>();
  r.auc_pr = j.at("auc_pr").get<double>();
  r.n_anchors = j.at("n_anchors").get<int>();
  r.degenerate = j.at("degenerate").get<bool>();
  return r;
}

void write_curve_csv(const std::filesystem::path& path, const RetrievalReport& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "K,mean_precision,mean_recall\n";
  char buf[96];
  for (size_t i = 0; i < r.k_values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.k_values[i], r.mean_precision[i], r.mean_recall[i]);
    out << buf;
  }
}

}  // namespace motif
