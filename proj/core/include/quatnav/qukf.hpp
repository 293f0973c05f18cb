#pragma once

#include <array>
#include <span>

#include <Eigen/Core>

#include "quatnav/kinematics.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {

inline constexpr int kErrorDim = 15;
inline constexpr int kNoiseDim = 6;
inline constexpr int kAugmentedDim = kErrorDim + kNoiseDim;
inline constexpr int kSigmaCount = 2 * kAugmentedDim + 1;

/// Error-space ordering: [dr, dp, dv, db_gyro, db_accel].
using ErrorVec = Eigen::Matrix<double, kErrorDim, 1>;
using ErrorCov = Eigen::Matrix<double, kErrorDim, kErrorDim>;
using NoiseVec = Eigen::Matrix<double, kNoiseDim, 1>;
using NoiseCov = Eigen::Matrix<double, kNoiseDim, kNoiseDim>;
using AugmentedVec = Eigen::Matrix<double, kAugmentedDim, 1>;
using AugmentedCov = Eigen::Matrix<double, kAugmentedDim, kAugmentedDim>;

/// a (-) b on the full state: boxminus on attitude, plain difference elsewhere.
ErrorVec state_difference(const NavState& a, const NavState& b);
/// x (+) dx: boxplus on attitude, plain sum elsewhere.
NavState state_boxplus(const NavState& x, const ErrorVec& dx);

/// Global chart [r(q), p, v, b_gyro, b_accel].
ErrorVec to_chart(const NavState& x);
NavState from_chart(const ErrorVec& chart);

struct UkfMoments {
  NavState mean;
  ErrorCov cov = ErrorCov::Zero();
};

struct AugmentedMoments {
  NavState mean;
  NoiseVec noise_mean = NoiseVec::Zero();
  AugmentedCov cov = AugmentedCov::Zero();
};

struct UkfTuning {
  double lambda = 1.0;
  double alpha = 1.0;
  double beta = 2.0;

  /// Throws PreconditionError unless lambda + 21 > 0.
  void validate() const;
};

/// Unscented weights; index 0 is the central point.
struct SigmaWeights {
  double mean0 = 0.0;
  double cov0 = 0.0;
  double other = 0.0;

  static SigmaWeights from(const UkfTuning& tuning);

  double mean(int j) const { return j == 0 ? mean0 : other; }
  double cov(int j) const { return j == 0 ? cov0 : other; }
  std::array<double, kSigmaCount> mean_weights() const;
  std::array<double, kSigmaCount> cov_weights() const;
};

struct AugmentedPoint {
  NavState state;
  Vec3 gyro_noise = Vec3::Zero();
  Vec3 accel_noise = Vec3::Zero();
};

struct SigmaPointSet {
  std::array<AugmentedPoint, kSigmaCount> points;
  SigmaWeights weights;
};

struct PropagatedPoints {
  std::array<NavState, kSigmaCount> states;
  SigmaWeights weights;
};

struct TimeUpdateResult {
  UkfMoments predicted;
  PropagatedPoints points;
};

struct MeasurementUpdateResult {
  UkfMoments posterior;
  Eigen::VectorXd predicted_measurement;
  Eigen::MatrixXd innovation_cov;
};

/// Append the six IMU noise dimensions: cov = blockdiag(P, C_gyro, C_accel).
AugmentedMoments augment(const UkfMoments& moments, const ImuNoiseParams& noise);

/// 43 manifold sigma points from the lower Cholesky factor of the augmented
/// covariance, scaled by sqrt(21 + lambda).
SigmaPointSet sigma_points(const AugmentedMoments& aug, const UkfTuning& tuning);

/// Pushes every sigma point through the exact discrete kinematics with
/// sample time world.dt and recombines: weighted quaternion mean for attitude,
/// weighted sums elsewhere, covariance plus blockdiag(0_9, C_bg, C_ba).
TimeUpdateResult time_update(const SigmaPointSet& sigma, const ImuSample& u,
                             const WorldParams& world, const ImuNoiseParams& noise);

/// Landmark update with gain K = P_xz * P_zz^-1. Requires m_z > 0.
MeasurementUpdateResult measurement_update(const UkfMoments& predicted,
                                           const PropagatedPoints& points,
                                           const Eigen::VectorXd& z,
                                           std::span<const Vec3> world_points,
                                           const Eigen::MatrixXd& landmark_cov);

}  // namespace quatnav
