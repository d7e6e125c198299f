#include "motif/clustering.h"

#include <algorithm>
#include <deque>
#include <string>

namespace motif {
namespace {

Mat pairwise_distances(const Mat& x) {
  const Eigen::Index n = x.rows();
  Mat d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
    }
  }
  return d;
}

}  // namespace

void DbscanConfig::validate() const {
  if (min_pts < 1) throw ConfigError("viz.min_pts must be positive");
  if (eps && !(*eps > 0.0)) throw ConfigError("viz.eps must be positive");
}

double auto_eps(const Mat& points, int k) {
  const Eigen::Index n = points.rows();
  if (n < 2) throw DomainError("auto_eps needs at least two points");
  const Eigen::Index kk = std::min<Eigen::Index>(k, n - 1);
  const Mat d = pairwise_distances(points);
  std::vector<double> kth;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row.push_back(d(i, j));
    }
    std::nth_element(row.begin(), row.begin() + (kk - 1), row.end());
    kth.push_back(row[kk - 1]);
  }
  std::sort(kth.begin(), kth.end());
  const size_t m = kth.size();
  return m % 2 ? kth[m / 2] : 0.5 * (kth[m / 2 - 1] + kth[m / 2]);
}

ClusterAssignment cluster_motifs(const Mat& points, const DbscanConfig& cfg, Warnings* warnings) {
  cfg.validate();
  const Eigen::Index n = points.rows();
  if (n < cfg.min_pts) {
    throw DomainError("cluster_motifs needs at least min_pts = " + std::to_string(cfg.min_pts) + " points, got " +
                      std::to_string(n));
  }
  ClusterAssignment out;
  out.eps = cfg.eps ? *cfg.eps : (n >= 2 ? auto_eps(points, cfg.min_pts) : 0.0);
  out.labels.assign(static_cast<size_t>(n), kNoise);

  const Mat d = pairwise_distances(points);
  std::vector<std::vector<Eigen::Index>> neighbours(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (d(i, j) <= out.eps) neighbours[i].push_back(j);
    }
  }
  auto is_core = [&](Eigen::Index i) { return static_cast<int>(neighbours[i].size()) >= cfg.min_pts; };

  std::vector<bool> visited(static_cast<size_t>(n), false);
  int next_id = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (visited[i] || !is_core(i)) continue;
    const int id = next_id++;
    std::deque<Eigen::Index> frontier{i};
    visited[i] = true;
    out.labels[i] = id;
    while (!frontier.empty()) {
      const Eigen::Index p = frontier.front();
      frontier.pop_front();
      if (!is_core(p)) continue;
      for (Eigen::Index q : neighbours[p]) {
        if (out.labels[q] == kNoise) out.labels[q] = id;
        if (!visited[q] && out.labels[q] == id) {
          visited[q] = true;
          frontier.push_back(q);
        }
      }
    }
  }

  out.centers.assign(static_cast<size_t>(next_id), Vec::Zero(points.cols()));
  std::vector<int> counts(static_cast<size_t>(next_id), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out.labels[i] == kNoise) continue;
    out.centers[out.labels[i]] += points.row(i).transpose();
    ++counts[out.labels[i]];
  }
  for (int c = 0; c < next_id; ++c) out.centers[c] /= counts[c];
  if (next_id == 0) warn(warnings, "DBSCAN labelled every point as noise (eps = " + std::to_string(out.eps) + ")");
  return out;
}

}  // namespace motif
