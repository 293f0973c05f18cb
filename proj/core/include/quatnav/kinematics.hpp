#pragma once

#include "quatnav/geometry.hpp"

namespace quatnav {

/// Navigation state: attitude (body to world), world-frame position and
/// velocity, gyro and accelerometer biases. 16 parameters, 15 error dims.
struct NavState {
  Quaternion q;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 bias_gyro = Vec3::Zero();
  Vec3 bias_accel = Vec3::Zero();
};

struct TimedState {
  double t = 0.0;
  NavState state;
};

/// Measured body rates: angular velocity (rad/s) and specific force (m/s^2).
struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

struct WorldParams {
  Vec3 gravity{0.0, 0.0, -9.81};
  /// Nominal sample time; streaming code substitutes timestamp differences.
  double dt = 0.005;
};

struct StateDerivative {
  Vec4 q_dot;
  Vec3 p_dot;
  Vec3 v_dot;
};

/// 4x4 generator with q_dot = 0.5 * gamma(omega) * q.
Mat4 gamma(const Vec3& omega);

StateDerivative continuous_derivative(const NavState& state, const Vec3& omega, const Vec3& acc,
                                      const WorldParams& world);

/// exp(0.5 * gamma(omega) * dt) * q in closed form.
Quaternion attitude_transition(const Quaternion& q, const Vec3& omega, double dt);

/**
 * Zero-order-hold exact step over world.dt with (omega, acc) already corrected
 * for bias and noise. The attitude used to rotate `acc` is frozen at the start
 * of the step; biases are carried over unchanged.
 */
NavState propagate_exact(const NavState& state, const Vec3& omega, const Vec3& acc,
                         const WorldParams& world);

}  // namespace quatnav
