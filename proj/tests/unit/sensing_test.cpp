#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quatnav/errors.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {
namespace {

using std::numbers::pi;

TEST(LandmarkH, IdentityPose) {
  const std::vector<Vec3> fw{{1, 2, 3}, {-4, 5, 0.5}};
  const Eigen::VectorXd z = landmark_h(NavState{}, fw);
  ASSERT_EQ(z.size(), 6);
  EXPECT_EQ(z.head<3>(), fw[0]);
  EXPECT_EQ(z.tail<3>(), fw[1]);
}

TEST(LandmarkH, QuarterYawExample) {
  NavState x;
  x.q = Quaternion(std::cos(pi / 4), 0, 0, std::sin(pi / 4));
  x.p = Vec3(1, 0, 0);
  const std::vector<Vec3> fw{{2, 0, 0}};
  EXPECT_LE((landmark_h(x, fw) - Eigen::Vector3d(0, -1, 0)).norm(), 1e-15);
}

TEST(LandmarkH, EmptyListGivesEmptyVector) {
  EXPECT_EQ(landmark_h(NavState{}, std::vector<Vec3>{}).size(), 0);
}

TEST(LandmarkH, InverseAndEquivariance) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const NavState x = test::random_state(rng);
    std::vector<Vec3> fw;
    for (int j = 0; j < 4; ++j) fw.push_back(test::random_vec3(rng, 10.0));
    const Eigen::VectorXd z = landmark_h(x, fw);
    const Mat3 r = test::rodrigues(quat_to_rotvec(x.q));
    for (int j = 0; j < 4; ++j) {
      EXPECT_LE((r * z.segment<3>(3 * j) + x.p - fw[j]).norm(), 1e-12);
    }
    // move the whole world rigidly
    const Quaternion q0(test::random_unit4(rng));
    const Vec3 p0 = test::random_vec3(rng, 5.0);
    const Mat3 r0 = quat_to_rotmat(q0);
    NavState moved = x;
    moved.q = q0 * x.q;
    moved.p = r0 * x.p + p0;
    std::vector<Vec3> fw_moved;
    for (const auto& f : fw) fw_moved.push_back(r0 * f + p0);
    EXPECT_LE((landmark_h(moved, fw_moved) - z).norm(), 1e-10);
  }
}

TEST(LandmarkFrame, StackingFollowsListOrder) {
  LandmarkFrame frame;
  frame.landmarks = {{7, {1, 1, 1}, {1, 2, 3}}, {3, {2, 2, 2}, {4, 5, 6}}};
  EXPECT_EQ(frame.measurement_dim(), 6);
  Eigen::VectorXd expected(6);
  expected << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(frame.stacked_body(), expected);
  EXPECT_EQ(frame.world_points()[1], Vec3(2, 2, 2));
}

TEST(LandmarkNoise, DefaultIsIsotropic) {
  LandmarkNoise n;
  n.sigma = 0.5;
  EXPECT_EQ(n.covariance(6), Eigen::MatrixXd::Identity(6, 6) * 0.25);
  n.full = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(n.covariance(3), Eigen::MatrixXd::Identity(3, 3));
  EXPECT_THROW(n.covariance(6), ConfigError);
}

TEST(ImuForwardModel, NoiseFreeExamples) {
  RandomStream rng(1);
  const Vec3 w(0.1, -0.2, 0.3);
  const Vec3 a(1, 2, 3);
  auto out = imu_forward_model(0.5, w, a, ImuBias{}, ImuNoiseParams{}, rng);
  EXPECT_EQ(out.sample.gyro, w);
  EXPECT_EQ(out.sample.accel, a);
  EXPECT_EQ(out.sample.t, 0.5);

  ImuBias bias;
  bias.gyro = Vec3(0.01, 0, 0);
  out = imu_forward_model(0.0, w, a, bias, ImuNoiseParams{}, rng);
  EXPECT_LE((out.sample.gyro - w - Vec3(0.01, 0, 0)).norm(), 1e-17);
  EXPECT_EQ(out.next_bias.gyro, bias.gyro);

  const auto [w2, a2] = correct_inputs(out.sample, bias);
  EXPECT_LE((w2 - w).norm(), 1e-16);
  EXPECT_EQ(a2, a);
}

TEST(ImuForwardModel, NoiseMatchesCovariance) {
  std::mt19937_64 gen(42);
  const Mat3 cov = test::random_spd(gen, 3, 0.01);
  ImuNoiseParams noise;
  noise.gyro = cov;
  RandomStream rng(5);
  const int n = 100000;
  Mat3 acc = Mat3::Zero();
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec3 e = imu_forward_model(0.0, Vec3::Zero(), Vec3::Zero(), ImuBias{}, noise, rng).sample.gyro;
    acc += e * e.transpose();
    mean += e;
  }
  mean /= n;
  acc = acc / n - mean * mean.transpose();
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(acc(i, i) / cov(i, i), 1.0, 0.05);
  }
  // chi-square of the whitened sample mean
  const double chi = n * mean.dot(cov.ldlt().solve(mean));
  EXPECT_LT(chi, 11.34);
}

TEST(CorrectInputs, SymmetricNoiseColumns) {
  ImuSample u;
  u.gyro = Vec3(0.3, 0.2, 0.1);
  ImuBias bias;
  bias.gyro = Vec3(0.01, 0.02, 0.03);
  const Vec3 sigma(0.05, 0.0, 0.0);
  const auto plus = correct_inputs(u, bias, sigma).first;
  const auto minus = correct_inputs(u, bias, -sigma).first;
  EXPECT_LE((0.5 * (plus + minus) - (u.gyro - bias.gyro)).norm(), 1e-16);
}

}  // namespace
}  // namespace quatnav
