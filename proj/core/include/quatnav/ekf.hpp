#pragma once

#include <span>

#include <Eigen/Core>

#include "quatnav/qukf.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {

/// Error-state (multiplicative) EKF over the same state and error ordering as
/// the quaternion UKF. Attitude errors are left perturbations: q = q(dr) * q_hat.
struct EkfState {
  NavState mean;
  ErrorCov cov = ErrorCov::Zero();
};

using NoiseJacobian = Eigen::Matrix<double, kErrorDim, kNoiseDim>;

struct EkfJacobians {
  ErrorCov transition;     ///< F: d(error_{k}) / d(error_{k-1})
  NoiseJacobian noise;     ///< G: d(error_{k}) / d[n_gyro, n_accel]
};

/// Right Jacobian of SO(3): Exp(phi + d) ~= Exp(phi) Exp(J_r(phi) d).
Mat3 so3_right_jacobian(const Vec3& phi);

/// Jacobians of the exact discrete step at `mean` with IMU sample `u` over `dt`.
EkfJacobians ekf_jacobians(const NavState& mean, const ImuSample& u, double dt);

/// Landmark measurement Jacobian: rows 3i..3i+2 are
/// [R^T [f_w - p]x, -R^T, 0, 0, 0].
Eigen::MatrixXd landmark_jacobian(const NavState& mean, std::span<const Vec3> world_points);

/// Mean via the exact discrete kinematics; P <- F P F^T + G C_x G^T + C_w.
/// Uses world.dt as the step length.
EkfState ekf_predict(const EkfState& state, const ImuSample& u, const ImuNoiseParams& noise,
                     const WorldParams& world);

/// Standard gain, boxplus correction and Joseph-form covariance update.
EkfState ekf_update(const EkfState& state, const LandmarkFrame& frame,
                    const Eigen::MatrixXd& landmark_cov);

}  // namespace quatnav
