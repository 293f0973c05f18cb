#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "quatnav/kinematics.hpp"
#include "quatnav/random.hpp"

namespace quatnav {

/// Per-sample IMU noise covariances and per-sample bias random-walk covariances.
struct ImuNoiseParams {
  Mat3 gyro = Mat3::Zero();
  Mat3 accel = Mat3::Zero();
  Mat3 gyro_bias_walk = Mat3::Zero();
  Mat3 accel_bias_walk = Mat3::Zero();
};

struct ImuBias {
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

/// One landmark with known correspondence: world point and its body-frame observation.
struct Landmark {
  long id = 0;
  Vec3 world = Vec3::Zero();
  Vec3 body = Vec3::Zero();
};

struct LandmarkFrame {
  double t = 0.0;
  std::vector<Landmark> landmarks;

  Eigen::Index measurement_dim() const { return 3 * static_cast<Eigen::Index>(landmarks.size()); }
  /// Stacked body observations z, in list order.
  Eigen::VectorXd stacked_body() const;
  std::vector<Vec3> world_points() const;
};

/// Landmark noise: isotropic sigma unless a full covariance is supplied.
struct LandmarkNoise {
  double sigma = 0.02;
  std::optional<Eigen::MatrixXd> full;

  /// C_f for a frame with measurement dimension m_z.
  Eigen::MatrixXd covariance(Eigen::Index m_z) const;
};

/// Stacked f_b,i = R(q)^T (f_w,i - p).
Eigen::VectorXd landmark_h(const NavState& state, std::span<const Vec3> world_points);

struct ImuForwardResult {
  ImuSample sample;
  ImuBias next_bias;
};

/// Measured rates from true rates: adds bias and white noise, then steps the
/// bias random walk. Used by the simulator only.
ImuForwardResult imu_forward_model(double t, const Vec3& true_omega, const Vec3& true_acc,
                                   const ImuBias& bias, const ImuNoiseParams& noise,
                                   RandomStream& rng);

/// True-rate inputs for the kinematics: measured minus bias minus noise.
std::pair<Vec3, Vec3> correct_inputs(const ImuSample& u, const ImuBias& bias,
                                     const Vec3& gyro_noise = Vec3::Zero(),
                                     const Vec3& accel_noise = Vec3::Zero());

}  // namespace quatnav
