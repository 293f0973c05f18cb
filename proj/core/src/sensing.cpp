#include "quatnav/sensing.hpp"

#include <string>

#include "quatnav/errors.hpp"

namespace quatnav {

Eigen::VectorXd LandmarkFrame::stacked_body() const {
  Eigen::VectorXd z(measurement_dim());
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    z.segment<3>(3 * static_cast<Eigen::Index>(i)) = landmarks[i].body;
  }
  return z;
}

std::vector<Vec3> LandmarkFrame::world_points() const {
  std::vector<Vec3> out;
  out.reserve(landmarks.size());
  for (const auto& l : landmarks) {
    out.push_back(l.world);
  }
  return out;
}

Eigen::MatrixXd LandmarkNoise::covariance(Eigen::Index m_z) const {
  if (full) {
    if (full->rows() != m_z || full->cols() != m_z) {
      throw ConfigError("landmark covariance is " + std::to_string(full->rows()) + "x" +
                        std::to_string(full->cols()) + " but the frame has m_z = " +
                        std::to_string(m_z));
    }
    return *full;
  }
  return Eigen::MatrixXd::Identity(m_z, m_z) * (sigma * sigma);
}

Eigen::VectorXd landmark_h(const NavState& state, std::span<const Vec3> world_points) {
  const Mat3 rt = quat_to_rotmat(state.q).transpose();
  Eigen::VectorXd out(3 * static_cast<Eigen::Index>(world_points.size()));
  for (std::size_t i = 0; i < world_points.size(); ++i) {
    out.segment<3>(3 * static_cast<Eigen::Index>(i)) = rt * (world_points[i] - state.p);
  }
  return out;
}

ImuForwardResult imu_forward_model(double t, const Vec3& true_omega, const Vec3& true_acc,
                                   const ImuBias& bias, const ImuNoiseParams& noise,
                                   RandomStream& rng) {
  auto draw = [&rng](const Mat3& cov) -> Vec3 {
    if (cov.isZero(0.0)) {
      return Vec3::Zero();
    }
    const Mat3 root = psd_sqrt(cov);
    return rng.gaussian(root);
  };
  ImuForwardResult out;
  out.sample.t = t;
  out.sample.gyro = true_omega + bias.gyro + draw(noise.gyro);
  out.sample.accel = true_acc + bias.accel + draw(noise.accel);
  out.next_bias.gyro = bias.gyro + draw(noise.gyro_bias_walk);
  out.next_bias.accel = bias.accel + draw(noise.accel_bias_walk);
  return out;
}

std::pair<Vec3, Vec3> correct_inputs(const ImuSample& u, const ImuBias& bias,
                                     const Vec3& gyro_noise, const Vec3& accel_noise) {
  return {u.gyro - bias.gyro - gyro_noise, u.accel - bias.accel - accel_noise};
}

}  // namespace quatnav
