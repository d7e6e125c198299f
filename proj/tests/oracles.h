#pragma once

// Independent reference implementations written straight from the definitions with
// plain loops. They share no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "motif/types.h"

namespace motif::oracle {

using Rows = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

inline double triplet(const Rows& z, const Rows& zp, const Rows& zn, double margin) {
  double total = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    const double h = dist(z[i], zp[i]) - dist(z[i], zn[i]) + margin;
    if (h > 0) total += h;
  }
  return total / static_cast<double>(z.size());
}

inline double invariance(const Rows& a, const Rows& b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a[i].size(); ++j) total += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
  }
  return total / static_cast<double>(a.size());
}

inline double column_mean(const Rows& z, size_t j) {
  double m = 0.0;
  for (const auto& r : z) m += r[j];
  return m / static_cast<double>(z.size());
}

inline double variance(const Rows& z, double eps) {
  const size_t n = z.size(), d = z[0].size();
  double total = 0.0;
  for (size_t j = 0; j < d; ++j) {
    const double m = column_mean(z, j);
    double v = 0.0;
    for (size_t i = 0; i < n; ++i) v += (z[i][j] - m) * (z[i][j] - m);
    v /= static_cast<double>(n - 1);
    total += std::max(0.0, 1.0 - std::sqrt(v + eps));
  }
  return total / static_cast<double>(d);
}

inline double covariance(const Rows& z) {
  const size_t n = z.size(), d = z[0].size();
  double total = 0.0;
  for (size_t a = 0; a < d; ++a) {
    for (size_t b = 0; b < d; ++b) {
      if (a == b) continue;
      const double ma = column_mean(z, a), mb = column_mean(z, b);
      double c = 0.0;
      for (size_t i = 0; i < n; ++i) c += (z[i][a] - ma) * (z[i][b] - mb);
      c /= static_cast<double>(n - 1);
      total += c * c;
    }
  }
  return total / static_cast<double>(d);
}

inline double vicreg(const Rows& a, const Rows& b, double alpha, double beta, double gamma, double eps) {
  return alpha * invariance(a, b) + beta * 0.5 * (variance(a, eps) + variance(b, eps)) +
         gamma * 0.5 * (covariance(a) + covariance(b));
}

/// Label rule by enumeration: for every chunk, every label note's share of the bar;
/// keep the largest strictly above 0.75, lower pitch on ties.
inline std::vector<MotifLabel> labels(const std::vector<PianoRollChunk>& chunks, const std::vector<NoteEvent>& notes,
                                      int beats_per_bar) {
  std::vector<MotifLabel> out;
  for (const auto& c : chunks) {
    const double lo = c.bar_index * static_cast<double>(beats_per_bar);
    const double hi = lo + beats_per_bar;
    std::optional<std::pair<double, int>> best;  // (coverage, pitch)
    for (const auto& n : notes) {
      const double s = std::max(lo, n.onset_beats);
      const double e = std::min(hi, n.onset_beats + n.duration_beats);
      if (e <= s) continue;
      const double cov = (e - s) / beats_per_bar;
      if (!best || cov > best->first || (cov == best->first && n.pitch < best->second)) best = {cov, n.pitch};
    }
    if (best && best->first > 0.75) out.push_back({c.song_id, c.bar_index, best->second});
  }
  return out;
}

struct PR {
  std::vector<int> k;
  std::vector<double> precision, recall;
  int anchors = 0;
};

/// Retrieval by full sort of every other item and naive counting.
inline PR retrieval(const Rows& x, const std::vector<std::optional<std::string>>& keys, const std::vector<int>& ks) {
  const size_t n = x.size();
  PR pr;
  pr.k = ks;
  pr.precision.assign(ks.size(), 0.0);
  pr.recall.assign(ks.size(), 0.0);
  for (size_t a = 0; a < n; ++a) {
    if (!keys[a]) continue;
    int relevant = 0;
    for (size_t b = 0; b < n; ++b) relevant += (b != a && keys[b] == keys[a]) ? 1 : 0;
    if (relevant == 0) continue;
    ++pr.anchors;
    std::vector<std::pair<double, size_t>> order;
    for (size_t b = 0; b < n; ++b) {
      if (b != a) order.push_back({dist(x[a], x[b]), b});
    }
    std::sort(order.begin(), order.end());
    for (size_t t = 0; t < ks.size(); ++t) {
      int hits = 0;
      for (int r = 0; r < ks[t]; ++r) hits += keys[order[static_cast<size_t>(r)].second] == keys[a] ? 1 : 0;
      pr.precision[t] += static_cast<double>(hits) / ks[t];
      pr.recall[t] += static_cast<double>(hits) / relevant;
    }
  }
  for (size_t t = 0; t < ks.size(); ++t) {
    pr.precision[t] /= pr.anchors;
    pr.recall[t] /= pr.anchors;
  }
  return pr;
}

inline double auc(const std::vector<double>& recall, const std::vector<double>& precision) {
  double area = recall[0] * precision[0];
  for (size_t i = 1; i < recall.size(); ++i) area += (recall[i] - recall[i - 1]) * (precision[i] + precision[i - 1]) / 2.0;
  return area;
}

/// Textbook DBSCAN: neighbourhoods by exhaustive scan, clusters grown from core points in index order.
inline std::vector<int> dbscan(const Rows& x, double eps, int min_pts) {
  const size_t n = x.size();
  std::vector<int> label(n, -2);  // -2 unvisited, -1 noise
  int next = 0;
  auto neighbours = [&](size_t i) {
    std::vector<size_t> out;
    for (size_t j = 0; j < n; ++j) {
      if (dist(x[i], x[j]) <= eps) out.push_back(j);
    }
    return out;
  };
  for (size_t i = 0; i < n; ++i) {
    if (label[i] != -2) continue;
    auto nb = neighbours(i);
    if (static_cast<int>(nb.size()) < min_pts) {
      label[i] = -1;
      continue;
    }
    const int id = next++;
    label[i] = id;
    std::vector<size_t> queue(nb.begin(), nb.end());
    for (size_t q = 0; q < queue.size(); ++q) {
      const size_t j = queue[q];
      if (label[j] == -1) label[j] = id;
      if (label[j] != -2) continue;
      label[j] = id;
      auto nj = neighbours(j);
      if (static_cast<int>(nj.size()) >= min_pts) queue.insert(queue.end(), nj.begin(), nj.end());
    }
  }
  return label;
}

}  // namespace motif::oracle
