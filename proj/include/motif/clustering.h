#pragma once

#include <optional>
#include <vector>

#include "motif/encoder.h"
#include "motif/errors.h"

namespace motif {

inline constexpr int kNoise = -1;

struct DbscanConfig {
  std::optional<double> eps;  // unset: median distance to the min_pts-th nearest neighbour
  int min_pts = 4;

  void validate() const;
};

struct ClusterAssignment {
  std::vector<int> labels;  // per point: cluster id >= 0 or kNoise
  std::vector<Vec> centers;  // member means, indexed by cluster id
  double eps = 0.0;

  int cluster_count() const { return static_cast<int>(centers.size()); }
  bool empty() const { return centers.empty(); }
};

/// Median over points of the distance to the k-th nearest other point.
double auto_eps(const Mat& points, int k);

/// DBSCAN over the rows of points with Euclidean distance. A neighbourhood includes
/// the point itself and uses dist <= eps. Clusters are numbered in order of their
/// first core point; border points join the first cluster that reaches them.
ClusterAssignment cluster_motifs(const Mat& points, const DbscanConfig& cfg, Warnings* warnings = nullptr);

}  // namespace motif
