#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quatnav/errors.hpp"
#include "quatnav/linalg.hpp"
#include "quatnav/random.hpp"

namespace quatnav {
namespace {

TEST(GaussianLogpdf, ClosedForms) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  EXPECT_NEAR(gaussian_logpdf(zero, zero, one), -0.9189385332046727, 1e-15);
  EXPECT_NEAR(gaussian_logpdf(Eigen::VectorXd::Ones(1), zero, one), -1.4189385332046727, 1e-15);
}

TEST(GaussianLogpdf, MatchesNaiveFormula) {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 15; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd cov = test::random_spd(rng, n, 0.5);
      const Eigen::VectorXd mean = Eigen::VectorXd::Random(n);
      const Eigen::VectorXd a = Eigen::VectorXd::Random(n);
      EXPECT_NEAR(gaussian_logpdf(a, mean, cov), test::naive_logpdf(a, mean, cov), 1e-10);
    }
  }
}

TEST(GaussianLogpdf, FactoredFormAgrees) {
  std::mt19937_64 rng(22);
  const Eigen::MatrixXd cov = test::random_spd(rng, 6, 1.0);
  const Eigen::VectorXd d = Eigen::VectorXd::Random(6);
  const Eigen::MatrixXd l = cov.llt().matrixL();
  EXPECT_NEAR(gaussian_logpdf_factored(d, l),
              gaussian_logpdf(d, Eigen::VectorXd::Zero(6), cov), 1e-12);
}

TEST(RobustCholesky, FactorsPositiveDefinite) {
  std::mt19937_64 rng(23);
  const Eigen::MatrixXd p = test::random_spd(rng, 8, 2.0);
  const Eigen::MatrixXd l = robust_cholesky(p);
  EXPECT_LE((l * l.transpose() - p).norm(), 1e-12);
  EXPECT_TRUE(l.isLowerTriangular());
}

TEST(RobustCholesky, JitterRescuesSemidefinite) {
  Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
  p(0, 0) = 1.0;
  p(1, 1) = 2.0;
  const Eigen::Matrix3d l = robust_cholesky(p);
  EXPECT_LE((l * l.transpose() - p).norm(), 1e-8);
}

TEST(RobustCholesky, ZeroMatrixGivesZeroFactor) {
  EXPECT_EQ(robust_cholesky(Eigen::Matrix4d::Zero()), Eigen::Matrix4d::Zero());
}

TEST(RobustCholesky, IndefiniteReportsPivot) {
  Eigen::Matrix3d p = Eigen::Matrix3d::Identity();
  p(2, 2) = -1.0;
  try {
    robust_cholesky(p);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.pivot(), 2);
  }
  EXPECT_THROW(gaussian_logpdf(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), p),
               NumericalError);
}

TEST(RandomStream, SubstreamsAreReproducibleAndDistinct) {
  auto a = RandomStream::substream(7, 3, 2, 1);
  auto b = RandomStream::substream(7, 3, 2, 1);
  auto c = RandomStream::substream(7, 3, 3, 1);
  auto d = RandomStream::substream(7, 3, 2, 2);
  const double x = a.normal();
  EXPECT_EQ(x, b.normal());
  EXPECT_NE(x, c.normal());
  EXPECT_NE(x, d.normal());
}

TEST(RandomStream, GaussianMatchesCovariance) {
  std::mt19937_64 rng(24);
  const Eigen::MatrixXd cov = test::random_spd(rng, 3, 1.0);
  const Eigen::MatrixXd l = cov.llt().matrixL();
  RandomStream s(99);
  const int n = 100000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d x = s.gaussian(l);
    acc += x * x.transpose();
  }
  acc /= n;
  EXPECT_LE(((acc - cov).array().abs() / cov.diagonal().maxCoeff()).maxCoeff(), 0.02);
}

TEST(PsdSqrt, ReconstructsAndHandlesSingular) {
  std::mt19937_64 rng(25);
  const Eigen::MatrixXd cov = test::random_spd(rng, 5, 1.0);
  const Eigen::MatrixXd s = psd_sqrt(cov);
  EXPECT_LE((s * s.transpose() - cov).norm(), 1e-12);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 3);
  singular(1, 1) = 4.0;
  const Eigen::MatrixXd t = psd_sqrt(singular);
  EXPECT_LE((t * t.transpose() - singular).norm(), 1e-12);
}

}  // namespace
}  // namespace quatnav
