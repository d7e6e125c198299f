#include "motif/sampling.h"

#include <map>
#include <set>

#include "motif/chunking.h"

namespace motif {
namespace {

std::vector<size_t> draw_distinct(size_t population, size_t n, Rng& rng) {
  std::vector<size_t> idx(population);
  for (size_t i = 0; i < population; ++i) idx[i] = i;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = i + uniform_index(rng, population - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  return idx;
}

/// Without replacement when possible, otherwise with replacement.
std::vector<size_t> draw_anchors(size_t population, size_t n, Rng& rng) {
  if (n <= population) return draw_distinct(population, n, rng);
  std::vector<size_t> out(n);
  for (auto& o : out) o = uniform_index(rng, population);
  return out;
}

std::pair<size_t, size_t> draw_two_views(size_t m, Rng& rng) {
  if (m <= 1) return {0, 0};
  const size_t a = uniform_index(rng, m);
  size_t p = uniform_index(rng, m - 1);
  if (p >= a) ++p;
  return {a, p};
}

Provenance provenance_of(const PianoRollChunk& c) { return {c.song_id, c.origin_id}; }

/// Flat list of chunks with their song, shared by both negative-sampling modes.
struct NegativePool {
  std::vector<const PianoRollChunk*> chunks;

  const PianoRollChunk* draw(const std::string& anchor_song, const PianoRollChunk& anchor, Rng& rng,
                             const NegativeOptions& opts, Warnings* warnings) const {
    auto cross_song = [&]() {
      for (;;) {
        const PianoRollChunk* c = chunks[uniform_index(rng, chunks.size())];
        if (c->song_id != anchor_song) return c;
      }
    };
    if (!opts.necl) return cross_song();
    std::vector<const PianoRollChunk*> candidates(static_cast<size_t>(std::max(1, opts.candidate_pool)));
    for (auto& c : candidates) c = cross_song();
    const auto keep = necl_keep(anchor, candidates, warnings);
    return candidates[keep[uniform_index(rng, keep.size())]];
  }
};

void require_two_songs(const std::vector<const PianoRollChunk*>& chunks) {
  std::set<std::string> songs;
  for (const auto* c : chunks) {
    songs.insert(c->song_id);
    if (songs.size() >= 2) return;
  }
  throw SamplingError("negative sampling needs chunks from at least two songs");
}

struct LabeledGroups {
  std::vector<const PianoRollChunk*> labeled;             // in label order
  std::vector<std::vector<size_t>> group_members;          // per group, indices into labeled
  std::vector<size_t> group_of;                            // per labeled chunk
  std::vector<size_t> eligible;                            // labeled chunks in groups of size >= 2
};

LabeledGroups group_labels(const LabeledView& data) {
  if (!data.chunks || !data.labels) throw SamplingError("labeled sampling needs chunks and labels");
  std::map<std::pair<std::string, int>, const PianoRollChunk*> by_bar;
  for (const auto& c : *data.chunks) by_bar[{c.song_id, c.bar_index}] = &c;
  LabeledGroups g;
  std::map<std::pair<std::string, int>, size_t> group_index;
  for (const auto& l : *data.labels) {
    auto it = by_bar.find({l.song_id, l.bar_index});
    if (it == by_bar.end()) {
      throw SamplingError("label (" + l.song_id + ", bar " + std::to_string(l.bar_index) + ") has no chunk");
    }
    auto [gi, inserted] = group_index.try_emplace({l.song_id, l.motif_id}, g.group_members.size());
    if (inserted) g.group_members.emplace_back();
    g.group_members[gi->second].push_back(g.labeled.size());
    g.group_of.push_back(gi->second);
    g.labeled.push_back(it->second);
  }
  for (size_t i = 0; i < g.labeled.size(); ++i) {
    if (g.group_members[g.group_of[i]].size() >= 2) g.eligible.push_back(i);
  }
  if (g.eligible.empty()) throw SamplingError("no motif has two or more labeled occurrences");
  return g;
}

const PianoRollChunk* draw_group_partner(const LabeledGroups& g, size_t member, Rng& rng) {
  const auto& members = g.group_members[g.group_of[member]];
  size_t pick = uniform_index(rng, members.size() - 1);
  for (size_t k = 0; k < members.size(); ++k) {
    if (members[k] == member) {
      if (pick >= k) ++pick;
      break;
    }
  }
  return g.labeled[members[pick]];
}

}  // namespace

double raster_iou(const PianoRollChunk& a, const PianoRollChunk& b) {
  const PianoRoll ra = rasterize(a);
  const PianoRoll rb = rasterize(b);
  if (ra.steps() != rb.steps()) throw DomainError("raster_iou: chunks have different steps_per_bar");
  int inter = 0, uni = 0;
  for (size_t i = 0; i < ra.cells().size(); ++i) {
    inter += ra.cells()[i] & rb.cells()[i];
    uni += ra.cells()[i] | rb.cells()[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

std::vector<size_t> necl_keep(const PianoRollChunk& anchor, const std::vector<const PianoRollChunk*>& candidates,
                              Warnings* warnings) {
  std::vector<size_t> keep;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (raster_iou(anchor, *candidates[i]) <= kNeclOverlapThreshold) keep.push_back(i);
  }
  if (keep.empty() && !candidates.empty()) {
    warn(warnings, "NECL filter removed every negative candidate for " + anchor.origin_id +
                       "; using the unfiltered pool");
    for (size_t i = 0; i < candidates.size(); ++i) keep.push_back(i);
  }
  return keep;
}

std::vector<PianoRollChunk> necl_filter(const PianoRollChunk& anchor, const std::vector<PianoRollChunk>& candidates,
                                        Warnings* warnings) {
  std::vector<const PianoRollChunk*> ptrs;
  for (const auto& c : candidates) ptrs.push_back(&c);
  std::vector<PianoRollChunk> out;
  for (size_t i : necl_keep(anchor, ptrs, warnings)) out.push_back(candidates[i]);
  return out;
}

PairBatch sample_pair_batch(const std::vector<ViewSet>& corpus, int n, Rng& rng) {
  if (n < 1) throw SamplingError("batch size must be positive");
  if (corpus.size() < static_cast<size_t>(n)) {
    throw SamplingError("corpus has " + std::to_string(corpus.size()) + " origins, fewer than batch size " +
                        std::to_string(n));
  }
  const auto origins = draw_distinct(corpus.size(), static_cast<size_t>(n), rng);
  PairBatch batch;
  for (size_t o : origins) {
    const auto& set = corpus[o];
    if (set.views.empty()) throw SamplingError("view set " + set.origin_id + " is empty");
    const auto [a, p] = draw_two_views(set.views.size(), rng);
    batch.anchors.push_back(&set.views[a]);
    batch.positives.push_back(&set.views[p]);
    batch.provenance.push_back(provenance_of(set.views[a]));
  }
  return batch;
}

PairBatch sample_pair_batch(const LabeledView& data, int n, Rng& rng) {
  if (n < 1) throw SamplingError("batch size must be positive");
  const LabeledGroups g = group_labels(data);
  if (g.eligible.size() < static_cast<size_t>(n)) {
    throw SamplingError("only " + std::to_string(g.eligible.size()) + " labeled chunks have a positive partner; batch size is " +
                        std::to_string(n));
  }
  PairBatch batch;
  for (size_t e : draw_distinct(g.eligible.size(), static_cast<size_t>(n), rng)) {
    const size_t member = g.eligible[e];
    batch.anchors.push_back(g.labeled[member]);
    batch.positives.push_back(draw_group_partner(g, member, rng));
    batch.provenance.push_back(provenance_of(*g.labeled[member]));
  }
  return batch;
}

TripletBatch sample_triplet_batch(const std::vector<ViewSet>& corpus, int n, Rng& rng, const NegativeOptions& negatives,
                                  Warnings* warnings) {
  if (n < 1) throw SamplingError("batch size must be positive");
  if (corpus.empty()) throw SamplingError("empty corpus");
  NegativePool pool;
  for (const auto& set : corpus) {
    for (const auto& v : set.views) pool.chunks.push_back(&v);
  }
  require_two_songs(pool.chunks);

  TripletBatch batch;
  for (size_t o : draw_anchors(corpus.size(), static_cast<size_t>(n), rng)) {
    const auto& set = corpus[o];
    const auto [a, p] = draw_two_views(set.views.size(), rng);
    const PianoRollChunk& anchor = set.views[a];
    const PianoRollChunk* neg = pool.draw(anchor.song_id, anchor, rng, negatives, warnings);
    batch.anchors.push_back(&anchor);
    batch.positives.push_back(&set.views[p]);
    batch.negatives.push_back(neg);
    batch.anchor_provenance.push_back(provenance_of(anchor));
    batch.positive_provenance.push_back(provenance_of(set.views[p]));
    batch.negative_provenance.push_back(provenance_of(*neg));
  }
  return batch;
}

TripletBatch sample_triplet_batch(const LabeledView& data, int n, Rng& rng, const NegativeOptions& negatives,
                                  Warnings* warnings) {
  if (n < 1) throw SamplingError("batch size must be positive");
  const LabeledGroups g = group_labels(data);
  NegativePool pool;
  for (const auto& c : *data.chunks) pool.chunks.push_back(&c);
  require_two_songs(pool.chunks);

  TripletBatch batch;
  for (size_t e : draw_anchors(g.eligible.size(), static_cast<size_t>(n), rng)) {
    const size_t member = g.eligible[e];
    const PianoRollChunk& anchor = *g.labeled[member];
    const PianoRollChunk* pos = draw_group_partner(g, member, rng);
    const PianoRollChunk* neg = pool.draw(anchor.song_id, anchor, rng, negatives, warnings);
    batch.anchors.push_back(&anchor);
    batch.positives.push_back(pos);
    batch.negatives.push_back(neg);
    batch.anchor_provenance.push_back(provenance_of(anchor));
    batch.positive_provenance.push_back(provenance_of(*pos));
    batch.negative_provenance.push_back(provenance_of(*neg));
  }
  return batch;
}

}  // namespace motif
