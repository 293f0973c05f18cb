#include "quatnav/kinematics.hpp"

#include <cmath>

#include "quatnav/errors.hpp"

namespace quatnav {

Mat4 gamma(const Vec3& omega) {
  Mat4 g;
  g(0, 0) = 0.0;
  g.block<1, 3>(0, 1) = -omega.transpose();
  g.block<3, 1>(1, 0) = omega;
  g.block<3, 3>(1, 1) = -skew(omega);
  return g;
}

StateDerivative continuous_derivative(const NavState& state, const Vec3& omega, const Vec3& acc,
                                      const WorldParams& world) {
  return {0.5 * gamma(omega) * state.q.coeffs(), state.v,
          world.gravity + quat_to_rotmat(state.q) * acc};
}

Quaternion attitude_transition(const Quaternion& q, const Vec3& omega, double dt) {
  const double rate = omega.norm();
  const Vec4& c = q.coeffs();
  if (rate * dt < 1e-8) {
    return Quaternion(Vec4(c + 0.5 * dt * (gamma(omega) * c)));
  }
  const double half = 0.5 * rate * dt;
  return Quaternion(Vec4(std::cos(half) * c + (std::sin(half) / rate) * (gamma(omega) * c)));
}

NavState propagate_exact(const NavState& state, const Vec3& omega, const Vec3& acc,
                         const WorldParams& world) {
  const double dt = world.dt;
  if (!(dt >= 0.0)) {
    throw PreconditionError("propagate_exact: negative sample time");
  }
  const Vec3 c = world.gravity + quat_to_rotmat(state.q) * acc;
  NavState next = state;
  next.q = attitude_transition(state.q, omega, dt);
  next.p = state.p + dt * state.v + (0.5 * dt * dt) * c;
  next.v = state.v + dt * c;
  return next;
}

}  // namespace quatnav
