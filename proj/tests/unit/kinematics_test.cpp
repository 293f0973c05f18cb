#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "checks.hpp"
#include "oracles.hpp"
#include "quatnav/kinematics.hpp"

namespace quatnav {
namespace {

using std::numbers::pi;

// q and -q are the same rotation; compare up to sign
double quat_distance(const Vec4& a, const Vec4& b) { return std::min((a - b).norm(), (a + b).norm()); }

TEST(ContinuousDerivative, Examples) {
  const WorldParams world;
  NavState x;
  EXPECT_EQ(continuous_derivative(x, Vec3::Zero(), Vec3::Zero(), world).q_dot, Vec4::Zero());
  const auto d = continuous_derivative(x, {0, 0, 1}, Vec3::Zero(), world);
  EXPECT_EQ(d.q_dot, Vec4(0, 0, 0, 0.5));

  std::mt19937_64 rng(31);
  x.q = Quaternion(test::random_unit4(rng));
  x.v = Vec3(1, 2, 3);
  const Vec3 hover = quat_to_rotmat(x.q).transpose() * (-world.gravity);
  const auto h = continuous_derivative(x, Vec3::Zero(), hover, world);
  EXPECT_LE(h.v_dot.norm(), 1e-14);
  EXPECT_EQ(h.p_dot, x.v);
}

TEST(AttitudeTransition, Examples) {
  std::mt19937_64 rng(32);
  const Quaternion q(test::random_unit4(rng));
  EXPECT_EQ(attitude_transition(q, Vec3::Zero(), 0.1).coeffs(), q.coeffs());
  const Quaternion yaw = attitude_transition(Quaternion::identity(), {0, 0, pi / 2}, 1.0);
  EXPECT_LE((yaw.coeffs() - Vec4(std::cos(pi / 4), 0, 0, std::sin(pi / 4))).norm(), 1e-15);
  EXPECT_LE((yaw.coeffs() - boxplus(Quaternion::identity(), {0, 0, pi / 2}).coeffs()).norm(), 1e-15);
}

TEST(AttitudeTransition, MatchesMatrixExponential) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> dt(1e-4, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q(test::random_unit4(rng));
    const Vec3 w = test::random_vec3(rng, 3.0);
    const double h = dt(rng);
    const Eigen::MatrixXd e = test::expm(0.5 * gamma(w) * h);
    const Vec4 expected = e * q.coeffs();
    const Quaternion got = attitude_transition(q, w, h);
    EXPECT_LE(quat_distance(got.coeffs(), expected), 1e-10);
    EXPECT_NEAR(got.coeffs().norm(), 1.0, 1e-12);
  }
}

TEST(AttitudeTransition, TinyRateUsesSeries) {
  const Quaternion q = rotvec_to_quat({0.2, -0.1, 0.4});
  const Vec3 w(1e-10, 0, 0);
  const Vec4 expected = test::expm(0.5 * gamma(w) * 0.01) * q.coeffs();
  EXPECT_LE(quat_distance(attitude_transition(q, w, 0.01).coeffs(), expected), 1e-15);
}

TEST(PropagateExact, FreeFall) {
  NavState x;
  WorldParams world;
  world.dt = 0.1;
  const NavState next = propagate_exact(x, Vec3::Zero(), Vec3::Zero(), world);
  EXPECT_NEAR(next.v.z(), -0.981, 1e-15);
  EXPECT_NEAR(next.p.z(), -0.04905, 1e-15);
  EXPECT_EQ(next.p.head<2>(), Eigen::Vector2d::Zero());
}

TEST(PropagateExact, HoverFixedPoint) {
  std::mt19937_64 rng(34);
  NavState x = test::random_state(rng);
  x.v.setZero();
  WorldParams world;
  const Vec3 hover = quat_to_rotmat(x.q).transpose() * (-world.gravity);
  const NavState next = propagate_exact(x, Vec3::Zero(), hover, world);
  EXPECT_LE((next.p - x.p).norm(), 1e-15);
  EXPECT_LE(next.v.norm(), 1e-14);
  EXPECT_EQ(next.q.coeffs(), x.q.coeffs());
  EXPECT_EQ(next.bias_gyro, x.bias_gyro);
  EXPECT_EQ(next.bias_accel, x.bias_accel);
}

TEST(PropagateExact, MatchesBlockGeneratorExponential) {
  EXPECT_LE(test::propagate_oracle_gap(1000, 35), 1e-9);
}

TEST(PropagateExact, ConsistentWithContinuousModel) {
  std::mt19937_64 rng(36);
  for (int i = 0; i < 100; ++i) {
    const NavState x = test::random_state(rng);
    const Vec3 w = test::random_vec3(rng, 1.0);
    const Vec3 a = test::random_vec3(rng, 10.0);
    WorldParams world;
    world.dt = 1e-6;
    const NavState next = propagate_exact(x, w, a, world);
    const auto d = continuous_derivative(x, w, a, world);
    // the stored sign is canonical, so align before differencing
    Vec4 qn = next.q.coeffs();
    if (qn.dot(x.q.coeffs()) < 0) qn = -qn;
    EXPECT_LE(((qn - x.q.coeffs()) / world.dt - d.q_dot).cwiseAbs().maxCoeff(), 1e-5);
    // forward difference carries the 0.5 * dt * |v_dot| curvature term
    EXPECT_LE(((next.p - x.p) / world.dt - d.p_dot).cwiseAbs().maxCoeff(), 1e-5 + 0.5 * world.dt * d.v_dot.norm());
    EXPECT_LE(((next.v - x.v) / world.dt - d.v_dot).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(PropagateExact, RejectsNegativeStep) {
  WorldParams world;
  world.dt = -0.1;
  EXPECT_ANY_THROW(propagate_exact(NavState{}, Vec3::Zero(), Vec3::Zero(), world));
}

}  // namespace
}  // namespace quatnav
