#include "quatnav/ekf.hpp"

#include <cmath>

#include "quatnav/errors.hpp"
#include "quatnav/linalg.hpp"

namespace quatnav {

Mat3 so3_right_jacobian(const Vec3& phi) {
  const double t2 = phi.squaredNorm();
  const Mat3 k = skew(phi);
  double c1;
  double c2;
  if (t2 < 1e-10) {
    c1 = 0.5 - t2 / 24.0;
    c2 = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t = std::sqrt(t2);
    c1 = (1.0 - std::cos(t)) / t2;
    c2 = (t - std::sin(t)) / (t2 * t);
  }
  return Mat3::Identity() - c1 * k + c2 * k * k;
}

EkfJacobians ekf_jacobians(const NavState& mean, const ImuSample& u, double dt) {
  const auto [omega, acc] = correct_inputs(u, {mean.bias_gyro, mean.bias_accel});
  const Mat3 r0 = quat_to_rotmat(mean.q);
  const Mat3 r1 = quat_to_rotmat(attitude_transition(mean.q, omega, dt));
  const Mat3 attitude_from_rate = -r1 * so3_right_jacobian(omega * dt) * dt;
  const Mat3 specific_force_skew = skew(r0 * acc);

  EkfJacobians j;
  ErrorCov& f = j.transition;
  f.setIdentity();
  f.block<3, 3>(0, 9) = attitude_from_rate;
  f.block<3, 3>(3, 0) = -0.5 * dt * dt * specific_force_skew;
  f.block<3, 3>(3, 6) = dt * Mat3::Identity();
  f.block<3, 3>(3, 12) = -0.5 * dt * dt * r0;
  f.block<3, 3>(6, 0) = -dt * specific_force_skew;
  f.block<3, 3>(6, 12) = -dt * r0;

  NoiseJacobian& g = j.noise;
  g.setZero();
  g.block<3, 3>(0, 0) = attitude_from_rate;
  g.block<3, 3>(3, 3) = -0.5 * dt * dt * r0;
  g.block<3, 3>(6, 3) = -dt * r0;
  return j;
}

Eigen::MatrixXd landmark_jacobian(const NavState& mean, std::span<const Vec3> world_points) {
  const Mat3 rt = quat_to_rotmat(mean.q).transpose();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(world_points.size()),
                                            kErrorDim);
  for (std::size_t i = 0; i < world_points.size(); ++i) {
    const auto row = 3 * static_cast<Eigen::Index>(i);
    h.block<3, 3>(row, 0) = rt * skew(world_points[i] - mean.p);
    h.block<3, 3>(row, 3) = -rt;
  }
  return h;
}

EkfState ekf_predict(const EkfState& state, const ImuSample& u, const ImuNoiseParams& noise,
                     const WorldParams& world) {
  const EkfJacobians j = ekf_jacobians(state.mean, u, world.dt);
  NoiseCov cx = NoiseCov::Zero();
  cx.topLeftCorner<3, 3>() = noise.gyro;
  cx.bottomRightCorner<3, 3>() = noise.accel;

  EkfState out;
  const auto [omega, acc] = correct_inputs(u, {state.mean.bias_gyro, state.mean.bias_accel});
  out.mean = propagate_exact(state.mean, omega, acc, world);
  ErrorCov cov = j.transition * state.cov * j.transition.transpose() +
                 j.noise * cx * j.noise.transpose();
  cov.block<3, 3>(9, 9) += noise.gyro_bias_walk;
  cov.block<3, 3>(12, 12) += noise.accel_bias_walk;
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

EkfState ekf_update(const EkfState& state, const LandmarkFrame& frame,
                    const Eigen::MatrixXd& landmark_cov) {
  const Eigen::Index m = frame.measurement_dim();
  if (m == 0) {
    throw PreconditionError("ekf_update: empty landmark frame");
  }
  if (landmark_cov.rows() != m || landmark_cov.cols() != m) {
    throw PreconditionError("ekf_update: landmark covariance has the wrong size");
  }
  const std::vector<Vec3> world_points = frame.world_points();
  const Eigen::MatrixXd h = landmark_jacobian(state.mean, world_points);
  const Eigen::VectorXd residual = frame.stacked_body() - landmark_h(state.mean, world_points);

  const Eigen::MatrixXd ph_t = state.cov * h.transpose();
  const Eigen::MatrixXd s = h * ph_t + landmark_cov;
  const Eigen::MatrixXd lower = robust_cholesky(s);
  if ((lower.diagonal().array() <= 0.0).any()) {
    throw NumericalError("ekf_update: singular innovation covariance", 0);
  }
  Eigen::MatrixXd gain_t = lower.triangularView<Eigen::Lower>().solve(ph_t.transpose());
  lower.triangularView<Eigen::Lower>().transpose().solveInPlace(gain_t);
  const Eigen::MatrixXd gain = gain_t.transpose();

  EkfState out;
  out.mean = state_boxplus(state.mean, ErrorVec(gain * residual));
  const ErrorCov i_kh = ErrorCov::Identity() - gain * h;
  const ErrorCov cov =
      i_kh * state.cov * i_kh.transpose() + gain * landmark_cov * gain.transpose();
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

}  // namespace quatnav
