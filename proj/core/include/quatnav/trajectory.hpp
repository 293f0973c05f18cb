#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "quatnav/kinematics.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {

enum class Motion { FigureEight, Circle, HoverThenDash };

Motion parse_motion(std::string_view name);
std::string to_string(Motion motion);

struct TrajectorySpec {
  double duration = 60.0;  ///< s
  int imu_rate = 200;      ///< Hz
  int cam_rate = 20;       ///< Hz, must divide imu_rate
  Motion motion = Motion::FigureEight;
  double amplitude = 2.0;          ///< m
  double angular_amplitude = 0.3;  ///< rad
  double rate = 0.5;               ///< base angular frequency of the path, rad/s
  int landmarks_per_frame = 20;
  Vec3 landmark_box_min{-6.0, -6.0, -3.0};
  Vec3 landmark_box_max{6.0, 6.0, 3.0};
  Vec3 gravity{0.0, 0.0, -9.81};

  void validate() const;
  std::size_t imu_samples() const;
  std::size_t camera_frames() const;
  std::size_t imu_per_frame() const;
};

/// Exact kinematic quantities of the analytic path at time t.
struct MotionSample {
  Quaternion q;
  Vec3 p;
  Vec3 v;
  Vec3 accel_world;  ///< d^2p/dt^2
  Vec3 omega_body;   ///< instantaneous body angular velocity
};

MotionSample sample_motion(const TrajectorySpec& spec, double t);

/// Error-free IMU readings that carry the true state from one sample to the next.
struct TrueRates {
  Vec3 omega = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
};

struct Trajectory {
  std::vector<TimedState> truth;
  std::vector<TrueRates> rates;
};

/**
 * Samples the analytic path at imu_rate. The rates at step k are the
 * interval-averaged body rates over [t_k, t_{k+1}]:
 *   omega_k = r(q_k^-1 * q_{k+1}) / dt,
 *   acc_k   = R(q_k)^T ((v_{k+1} - v_k) / dt - g),
 * so the zero-order-hold step reproduces attitude and velocity exactly.
 */
Trajectory generate_trajectory(const TrajectorySpec& spec);

struct SensorSpec {
  ImuNoiseParams imu_noise;
  ImuBias initial_bias;
  LandmarkNoise landmark_noise;
};

struct SensorStreams {
  std::vector<ImuSample> imu;
  std::vector<LandmarkFrame> frames;
  /// Bias in effect at each IMU sample.
  std::vector<ImuBias> bias;
};

/// IMU readings through the forward model and fresh landmark sets every
/// imu_rate / cam_rate samples. Deterministic in `seed`.
SensorStreams synthesize_sensors(const Trajectory& trajectory, const SensorSpec& sensors,
                                 const TrajectorySpec& spec, std::uint64_t seed);

}  // namespace quatnav
