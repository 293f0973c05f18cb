#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "quatnav/cli/config_file.hpp"
#include "quatnav/runner.hpp"
#include "quatnav/trajectory.hpp"

namespace quatnav::cli {

/// Per-sample standard deviations, isotropic per sensor axis.
struct ImuSigmas {
  double gyro = 0.0;
  double accel = 0.0;
  double gyro_bias_walk = 0.0;
  double accel_bias_walk = 0.0;

  ImuNoiseParams covariances() const;
};

struct SimulationSettings {
  TrajectorySpec trajectory;
  SensorSpec sensors;
  std::string echo;
};

/**
 * [trajectory] duration, imu_rate, cam_rate, motion, amplitude,
 *              angular_amplitude, rate, landmarks_per_frame,
 *              landmark_box_min, landmark_box_max, gravity
 * [imu_noise]  gyro_sigma, accel_sigma, gyro_bias_walk_sigma, accel_bias_walk_sigma
 * [bias]       gyro, accel   (initial values)
 * [landmark_noise] sigma
 */
SimulationSettings simulation_settings(const ConfigFile& file);
SimulationSettings load_simulation_settings(const std::filesystem::path& file);

enum class InitSource { GroundTruth, Explicit };

struct InitSettings {
  InitSource source = InitSource::GroundTruth;
  /// Explicit mean, or the offsets applied to ground truth at the first IMU time.
  NavState mean;
  Vec3 rotation_offset = Vec3::Zero();
  Vec3 position_offset = Vec3::Zero();
  Vec3 velocity_offset = Vec3::Zero();
  /// Standard deviations of the initial error state.
  double sigma_rotation = 0.1;
  double sigma_position = 0.1;
  double sigma_velocity = 0.1;
  double sigma_bias_gyro = 0.01;
  double sigma_bias_accel = 0.1;
};

struct EvaluationSettings {
  double convergence_threshold = 0.2;  ///< m
  double window_start = 10.0;          ///< s
};

struct FilterSettings {
  std::optional<FilterKind> kind;
  FilterConfig config;
  InitSettings init;
  EvaluationSettings evaluation;
  std::string echo;
  std::string source;  // file the settings were loaded from, if any
};

/**
 * [filter]  kind ("qupf" | "ekf" | "deadreckon"), particles, resample_threshold,
 *           epsilon, seed, proposal ("standard" | "literal")
 * [ukf]     lambda, alpha, beta
 * [imu_noise]  as for simulation
 * [landmark_noise] sigma
 * [world]   gravity
 * [init]    source ("groundtruth" | "explicit"), rotation_offset,
 *           position_offset, velocity_offset, q, p, v, bias_gyro, bias_accel,
 *           sigma_rotation, sigma_position, sigma_velocity, sigma_bias_gyro,
 *           sigma_bias_accel
 * [evaluation] convergence_threshold, window_start
 */
FilterSettings filter_settings(const ConfigFile& file);
FilterSettings load_filter_settings(const std::filesystem::path& file);

/// Diagonal P_0 from the init standard deviations.
ErrorCov initial_covariance(const InitSettings& init);

/// Fills config.init_mean/init_cov from the init settings, reading ground
/// truth at the first IMU timestamp when requested.
FilterConfig resolve_initial_state(const FilterSettings& settings, double t0,
                                   std::span<const TimedState> truth);

}  // namespace quatnav::cli
