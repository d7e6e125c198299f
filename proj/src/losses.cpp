#include "motif/losses.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "motif/errors.h"

namespace motif {
namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                      ")");
  }
}

void require_batch(const Mat& z, const char* op) {
  if (z.rows() < 2) throw DomainError(std::string(op) + ": needs a batch of at least 2 rows");
}

}  // namespace

void TripletConfig::validate() const {
  if (!(margin > 0.0)) throw ConfigError("triplet.margin must be positive");
}

void VICRegConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) throw ConfigError("vicreg weights must be nonnegative");
  if (!(eps >= 0.0)) throw ConfigError("vicreg.eps must be nonnegative");
}

double triplet_loss(const Vec& z, const Vec& z_pos, const Vec& z_neg, const TripletConfig& cfg) {
  if (z.size() != z_pos.size() || z.size() != z_neg.size()) throw DomainError("triplet_loss: length mismatch");
  return std::max((z - z_pos).norm() - (z - z_neg).norm() + cfg.margin, 0.0);
}

double triplet_loss(const Mat& z, const Mat& z_pos, const Mat& z_neg, const TripletConfig& cfg, Mat* dz, Mat* dz_pos,
                    Mat* dz_neg) {
  require_same_shape(z, z_pos, "triplet_loss");
  require_same_shape(z, z_neg, "triplet_loss");
  if (z.rows() == 0) throw DomainError("triplet_loss: empty batch");
  const double n = static_cast<double>(z.rows());
  if (dz) *dz = Mat::Zero(z.rows(), z.cols());
  if (dz_pos) *dz_pos = Mat::Zero(z.rows(), z.cols());
  if (dz_neg) *dz_neg = Mat::Zero(z.rows(), z.cols());

  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::RowVectorXd to_pos = z.row(i) - z_pos.row(i);
    const Eigen::RowVectorXd to_neg = z.row(i) - z_neg.row(i);
    const double d_pos = to_pos.norm();
    const double d_neg = to_neg.norm();
    const double hinge = d_pos - d_neg + cfg.margin;
    if (hinge <= 0.0) continue;
    total += hinge;
    // Zero distances contribute the zero subgradient.
    const Eigen::RowVectorXd g_pos = d_pos > 0.0 ? Eigen::RowVectorXd(to_pos / (d_pos * n)) : Eigen::RowVectorXd::Zero(z.cols());
    const Eigen::RowVectorXd g_neg = d_neg > 0.0 ? Eigen::RowVectorXd(to_neg / (d_neg * n)) : Eigen::RowVectorXd::Zero(z.cols());
    if (dz) dz->row(i) = g_pos - g_neg;
    if (dz_pos) dz_pos->row(i) = -g_pos;
    if (dz_neg) dz_neg->row(i) = g_neg;
  }
  return total / n;
}

double invariance_loss(const Mat& a, const Mat& b, Mat* da, Mat* db) {
  require_same_shape(a, b, "invariance_loss");
  if (a.rows() == 0) throw DomainError("invariance_loss: empty batch");
  const double n = static_cast<double>(a.rows());
  const Mat diff = a - b;
  if (da) *da = diff * (2.0 / n);
  if (db) *db = diff * (-2.0 / n);
  return diff.squaredNorm() / n;
}

double variance_loss(const Mat& z, double eps, Mat* dz) {
  require_batch(z, "variance_loss");
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  const Mat centered = z.rowwise() - z.colwise().mean();
  const Eigen::RowVectorXd var = centered.colwise().squaredNorm() / (n - 1.0);
  double loss = 0.0;
  if (dz) *dz = Mat::Zero(z.rows(), z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const double std_j = std::sqrt(var(j) + eps);
    if (std_j >= 1.0) continue;
    loss += 1.0 - std_j;
    if (dz && std_j > 0.0) {
      // d/dz_ij of -(1/d) sqrt(var_j + eps) = -(1/d) * (1 / (2 std_j)) * 2 (z_ij - mean_j) / (n - 1)
      dz->col(j) = centered.col(j) * (-1.0 / (d * std_j * (n - 1.0)));
    }
  }
  return loss / d;
}

double covariance_loss(const Mat& z, Mat* dz) {
  require_batch(z, "covariance_loss");
  const double n = static_cast<double>(z.rows());
  const double d = static_cast<double>(z.cols());
  const Mat centered = z.rowwise() - z.colwise().mean();
  Mat cov = (centered.transpose() * centered) / (n - 1.0);
  cov.diagonal().setZero();
  if (dz) {
    // dL/dC = 2 C_off / d (symmetric), dL/dZc = 2 Zc dL/dC / (n - 1); centering passes it through
    // because the columns of Zc dL/dC already sum to zero.
    *dz = centered * cov * (4.0 / (d * (n - 1.0)));
  }
  return cov.squaredNorm() / d;
}

VICRegTerms vicreg_loss(const Mat& a, const Mat& b, const VICRegConfig& cfg, Mat* da, Mat* db) {
  require_same_shape(a, b, "vicreg_loss");
  VICRegTerms t;
  Mat inv_a, inv_b, var_a, var_b, cov_a, cov_b;
  const bool grads = da || db;
  t.invariance = invariance_loss(a, b, grads ? &inv_a : nullptr, grads ? &inv_b : nullptr);
  t.variance = 0.5 * (variance_loss(a, cfg.eps, grads ? &var_a : nullptr) + variance_loss(b, cfg.eps, grads ? &var_b : nullptr));
  t.covariance = 0.5 * (covariance_loss(a, grads ? &cov_a : nullptr) + covariance_loss(b, grads ? &cov_b : nullptr));
  t.total = cfg.alpha * t.invariance + cfg.beta * t.variance + cfg.gamma * t.covariance;
  if (da) *da = cfg.alpha * inv_a + (0.5 * cfg.beta) * var_a + (0.5 * cfg.gamma) * cov_a;
  if (db) *db = cfg.alpha * inv_b + (0.5 * cfg.beta) * var_b + (0.5 * cfg.gamma) * cov_b;
  return t;
}

}  // namespace motif
