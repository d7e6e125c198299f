#pragma once

#include "motif/encoder.h"

namespace motif {

struct TripletConfig {
  double margin = 1.0;

  void validate() const;
};

struct VICRegConfig {
  double alpha = 25.0;  // invariance weight
  double beta = 25.0;   // variance weight
  double gamma = 1.0;   // covariance weight
  double eps = 1e-4;    // added to the variance before the square root

  void validate() const;
};

// Batches are row-major in the sense that each row is one embedding.

/// max(|z - z+| - |z - z-| + margin, 0) with Euclidean distances.
double triplet_loss(const Vec& z, const Vec& z_pos, const Vec& z_neg, const TripletConfig& cfg);
/// Mean of the per-row triplet loss. Gradients are written when the pointers are non-null.
double triplet_loss(const Mat& z, const Mat& z_pos, const Mat& z_neg, const TripletConfig& cfg, Mat* dz = nullptr,
                    Mat* dz_pos = nullptr, Mat* dz_neg = nullptr);

/// (1/n) sum_i |a_i - b_i|^2.
double invariance_loss(const Mat& a, const Mat& b, Mat* da = nullptr, Mat* db = nullptr);

/// (1/d') sum_j max(0, 1 - sqrt(var_j + eps)) with the unbiased column variance. Needs n >= 2.
double variance_loss(const Mat& z, double eps = 1e-4, Mat* dz = nullptr);

/// (1/d') sum_{i != j} C_ij^2, C the unbiased sample covariance. Needs n >= 2.
double covariance_loss(const Mat& z, Mat* dz = nullptr);

struct VICRegTerms {
  double invariance = 0.0;
  double variance = 0.0;    // mean over the two batches
  double covariance = 0.0;  // mean over the two batches
  double total = 0.0;
};

/// alpha * inv + beta * var + gamma * cov, with var and cov averaged over both batches.
VICRegTerms vicreg_loss(const Mat& a, const Mat& b, const VICRegConfig& cfg, Mat* da = nullptr, Mat* db = nullptr);

}  // namespace motif
