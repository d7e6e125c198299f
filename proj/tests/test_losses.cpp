#include <gtest/gtest.h>

#include "motif/errors.h"
#include "motif/losses.h"
#include "motif/rng.h"
#include "oracles.h"

using namespace motif;

namespace {

Mat to_mat(const oracle::Rows& r) {
  Mat m(static_cast<long>(r.size()), static_cast<long>(r[0].size()));
  for (size_t i = 0; i < r.size(); ++i) {
    for (size_t j = 0; j < r[i].size(); ++j) m(static_cast<long>(i), static_cast<long>(j)) = r[i][j];
  }
  return m;
}

oracle::Rows random_rows(Rng& rng, int n, int d, double scale) {
  oracle::Rows r(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(d)));
  for (auto& row : r) {
    for (auto& v : row) v = scale * standard_normal(rng);
  }
  return r;
}

bool close(double a, double b, double rel = 1e-6) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-12; }

Mat rows(std::initializer_list<std::initializer_list<double>> r) {
  oracle::Rows out;
  for (const auto& row : r) out.emplace_back(row);
  return to_mat(out);
}

}  // namespace

TEST(Triplet, NegativeBeyondMarginGivesZero) {
  EXPECT_EQ(triplet_loss(Vec(Vec::Zero(2)), Vec(Vec::Zero(2)), Vec{{3.0, 0.0}}, {}), 0.0);
}

TEST(Triplet, CollapsedTripletCostsTheMargin) {
  const Vec z{{0.3, -0.2}};
  EXPECT_EQ(triplet_loss(z, z, z, {}), 1.0);
}

TEST(Triplet, HandComputedValue) {
  // |z - z+| = 1, |z - z-| = 0.5, margin 1.
  EXPECT_DOUBLE_EQ(triplet_loss(Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}, Vec{{0.5, 0.0}}, {}), 1.5);
}

TEST(Triplet, LengthMismatchIsDomainError) {
  EXPECT_THROW(triplet_loss(Vec(Vec::Zero(2)), Vec(Vec::Zero(3)), Vec(Vec::Zero(2)), {}), DomainError);
  EXPECT_THROW(triplet_loss(Mat(Mat::Zero(2, 2)), Mat(Mat::Zero(3, 2)), Mat(Mat::Zero(2, 2)), {}), DomainError);
}

TEST(Invariance, Examples) {
  const Mat a = rows({{1, 2}, {0, 0}});
  EXPECT_EQ(invariance_loss(a, a), 0.0);
  EXPECT_DOUBLE_EQ(invariance_loss(rows({{0, 0}, {1, 1}}), rows({{1, 0}, {1, 2}})), 1.0);
  EXPECT_DOUBLE_EQ(invariance_loss(rows({{1, 2}}), rows({{3, 2}})), 4.0);
  EXPECT_THROW(invariance_loss(Mat::Zero(2, 2), Mat::Zero(3, 2)), DomainError);
}

TEST(Variance, ConstantBatchHitsTheFullHinge) {
  const Mat z = rows({{1, 5}, {1, 5}, {1, 5}});
  EXPECT_EQ(variance_loss(z, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(variance_loss(z, 1e-4), 1.0 - std::sqrt(1e-4));
}

TEST(Variance, Examples) {
  // sample variance of {0, 2} is 2
  EXPECT_EQ(variance_loss(rows({{0}, {2}})), 0.0);
  Mat alt(64, 3);
  for (long i = 0; i < 64; ++i) alt.row(i).setConstant(i % 2 ? 1.0 : -1.0);
  EXPECT_EQ(variance_loss(alt), 0.0);
  EXPECT_THROW(variance_loss(Mat::Zero(1, 3)), DomainError);
}

TEST(Covariance, Examples) {
  EXPECT_EQ(covariance_loss(rows({{1}, {4}, {-2}})), 0.0);
  EXPECT_EQ(covariance_loss(rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})), 0.0);
  EXPECT_DOUBLE_EQ(covariance_loss(rows({{1, 1}, {-1, -1}})), 4.0);
  EXPECT_THROW(covariance_loss(Mat::Zero(1, 3)), DomainError);
}

TEST(VICReg, Examples) {
  Rng rng = derive_stream(3, "vicreg-examples");
  const Mat a = to_mat(random_rows(rng, 6, 4, 1.0)), b = to_mat(random_rows(rng, 6, 4, 1.0));
  EXPECT_EQ(vicreg_loss(a, b, {0, 0, 0, 1e-4}).total, 0.0);
  const Mat c = rows({{2, 2}, {2, 2}});
  EXPECT_EQ(vicreg_loss(c, c, {0, 1, 0, 0.0}).total, 1.0);

  const VICRegConfig def;
  const VICRegTerms t = vicreg_loss(a, b, def);
  const double var = 0.5 * (variance_loss(a) + variance_loss(b));
  const double cov = 0.5 * (covariance_loss(a) + covariance_loss(b));
  EXPECT_EQ(t.invariance, invariance_loss(a, b));
  EXPECT_EQ(t.variance, var);
  EXPECT_EQ(t.covariance, cov);
  EXPECT_EQ(t.total, 25.0 * invariance_loss(a, b) + 25.0 * var + 1.0 * cov);
}

TEST(Losses, AgreeWithOraclesOnRandomBatches) {
  Rng rng = derive_stream(11, "loss-oracle");
  for (int trial = 0; trial < 300; ++trial) {
    const int n = uniform_int(rng, 2, 16), d = uniform_int(rng, 1, 8);
    const double scale = uniform_real(rng, 0.05, 3.0);
    const auto a = random_rows(rng, n, d, scale), b = random_rows(rng, n, d, scale), c = random_rows(rng, n, d, scale);
    const Mat A = to_mat(a), B = to_mat(b), C = to_mat(c);
    EXPECT_TRUE(close(triplet_loss(A, B, C, {}), oracle::triplet(a, b, c, 1.0)));
    EXPECT_TRUE(close(invariance_loss(A, B), oracle::invariance(a, b)));
    EXPECT_TRUE(close(variance_loss(A), oracle::variance(a, 1e-4)));
    EXPECT_TRUE(close(covariance_loss(A), oracle::covariance(a)));
    EXPECT_TRUE(close(vicreg_loss(A, B, {}).total, oracle::vicreg(a, b, 25, 25, 1, 1e-4)));
  }
}

TEST(LossProperties, NonnegativeSymmetricAndPermutationInvariant) {
  Rng rng = derive_stream(12, "loss-props");
  for (int trial = 0; trial < 200; ++trial) {
    const int n = uniform_int(rng, 2, 12), d = uniform_int(rng, 1, 6);
    const Mat A = to_mat(random_rows(rng, n, d, 1.5)), B = to_mat(random_rows(rng, n, d, 1.5)),
              C = to_mat(random_rows(rng, n, d, 1.5));
    EXPECT_GE(triplet_loss(A, B, C, {}), 0.0);
    for (long i = 0; i < n; ++i) {
      const Vec z = A.row(i), zp = B.row(i), zn = C.row(i);
      EXPECT_LE(triplet_loss(z, zp, zn, {}), (z - zp).norm() + 1.0 + 1e-12);
    }
    EXPECT_EQ(invariance_loss(A, B), invariance_loss(B, A));

    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.setIdentity();
    for (int i = n - 1; i > 0; --i) std::swap(perm.indices()[i], perm.indices()[uniform_int(rng, 0, i)]);
    const Mat P = perm * A;
    EXPECT_NEAR(variance_loss(P), variance_loss(A), 1e-12);
    EXPECT_NEAR(covariance_loss(P), covariance_loss(A), 1e-9 * (1 + covariance_loss(A)));

    const Eigen::RowVectorXd shift = Eigen::RowVectorXd::Random(d) * 10.0;
    const Mat shifted = A.rowwise() + shift;
    EXPECT_NEAR(covariance_loss(shifted), covariance_loss(A), 1e-8 * (1 + covariance_loss(A)));
    EXPECT_GE(variance_loss(A), 0.0);
    EXPECT_GE(covariance_loss(A), 0.0);
  }
}

TEST(LossProperties, VarianceVanishesOnceEveryStdReachesOne) {
  Rng rng = derive_stream(13, "var-zero");
  for (int trial = 0; trial < 50; ++trial) {
    Mat z = to_mat(random_rows(rng, 10, 4, 1.0));
    const Mat centered = z.rowwise() - z.colwise().mean();
    for (long j = 0; j < z.cols(); ++j) {
      const double sd = std::sqrt(centered.col(j).squaredNorm() / 9.0);
      z.col(j) = centered.col(j) * (uniform_real(rng, 1.0, 3.0) / sd);
    }
    EXPECT_EQ(variance_loss(z), 0.0);
  }
}

TEST(LossConfig, Validation) {
  EXPECT_THROW((TripletConfig{0.0}).validate(), ConfigError);
  EXPECT_THROW((VICRegConfig{-1, 25, 1, 1e-4}).validate(), ConfigError);
  EXPECT_NO_THROW(VICRegConfig{}.validate());
}
