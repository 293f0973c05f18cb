#pragma once

#include <span>

#include <Eigen/Core>

namespace quatnav {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotation vector r = angle * axis, in radians.
using RotationVector = Eigen::Vector3d;
/// Element of SO(3).
using RotationMatrix = Eigen::Matrix3d;

/**
 * Unit quaternion stored as [w, x, y, z].
 *
 * Every constructor normalizes its input and applies the sign convention
 * w >= 0 (when w == 0 the first nonzero vector component is made positive),
 * so q and -q, which describe the same rotation, share one representation.
 */
class Quaternion {
 public:
  Quaternion() : coeffs_(1.0, 0.0, 0.0, 0.0) {}
  Quaternion(double w, double x, double y, double z);
  explicit Quaternion(const Vec4& wxyz);

  static Quaternion identity() { return {}; }

  double w() const { return coeffs_[0]; }
  double x() const { return coeffs_[1]; }
  double y() const { return coeffs_[2]; }
  double z() const { return coeffs_[3]; }
  Vec3 vec() const { return coeffs_.tail<3>(); }
  /// Coefficients in [w, x, y, z] order.
  const Vec4& coeffs() const { return coeffs_; }

  Quaternion inverse() const;

 private:
  Vec4 coeffs_;
};

Mat3 skew(const Vec3& x);
/// Inverse of skew(). Throws PreconditionError unless `m` is skew-symmetric to 1e-9.
Vec3 vex(const Mat3& m);
/// Anti-symmetric projection (D - D^T) / 2.
Mat3 pa(const Mat3& d);

Quaternion quat_product(const Quaternion& a, const Quaternion& b);
Quaternion quat_inverse(const Quaternion& q);
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) { return quat_product(a, b); }

RotationMatrix quat_to_rotmat(const Quaternion& q);
Quaternion rotvec_to_quat(const RotationVector& r);
/// Shortest rotation vector, |r| in [0, pi].
RotationVector quat_to_rotvec(const Quaternion& q);
RotationMatrix rotvec_to_rotmat(const RotationVector& r);

/// q1 (-) q2 = r(q1 * q2^-1).
RotationVector boxminus(const Quaternion& q1, const Quaternion& q2);
/// q (+) r = q(r) * q.
Quaternion boxplus(const Quaternion& q, const RotationVector& r);
/// q (-) r = q(r)^-1 * q.
Quaternion boxminus(const Quaternion& q, const RotationVector& r);

/**
 * Weighted quaternion mean: the unit eigenvector of D = sum_i s_i q_i q_i^T
 * belonging to the eigenvalue of largest magnitude.
 *
 * Weights may be negative (unscented mean weights). Throws PreconditionError
 * on empty or mismatched input and AmbiguityError when the dominant eigenvalue
 * is not separated from the next one by more than 1e-12 (relative).
 */
Quaternion quat_weighted_mean(std::span<const Quaternion> quats, std::span<const double> weights);

}  // namespace quatnav
