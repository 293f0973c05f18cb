#include "quatnav/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "quatnav/errors.hpp"

namespace quatnav {

namespace {

// Sign convention: w >= 0, ties broken by the first nonzero vector component.
void canonicalize(Vec4& c) {
  for (int i = 0; i < 4; ++i) {
    if (c[i] != 0.0) {
      if (c[i] < 0.0) {
        c = -c;
      }
      return;
    }
  }
}

}  // namespace

Quaternion::Quaternion(double w, double x, double y, double z) : Quaternion(Vec4(w, x, y, z)) {}

Quaternion::Quaternion(const Vec4& wxyz) : coeffs_(wxyz) {
  const double n2 = coeffs_.squaredNorm();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw PreconditionError("quaternion must have a finite nonzero norm");
  }
  // already unit to rounding: leave the bits alone so normalization is idempotent
  if (std::abs(n2 - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    coeffs_ /= std::sqrt(n2);
  }
  canonicalize(coeffs_);
}

Quaternion Quaternion::inverse() const {
  return Quaternion(Vec4(coeffs_[0], -coeffs_[1], -coeffs_[2], -coeffs_[3]));
}

Mat3 skew(const Vec3& x) {
  Mat3 m;
  m << 0.0, -x.z(), x.y(),
       x.z(), 0.0, -x.x(),
       -x.y(), x.x(), 0.0;
  return m;
}

Vec3 vex(const Mat3& m) {
  if ((m + m.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw PreconditionError("vex: argument is not skew-symmetric");
  }
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Mat3 pa(const Mat3& d) { return 0.5 * (d - d.transpose()); }

Quaternion quat_product(const Quaternion& a, const Quaternion& b) {
  const double w = a.w() * b.w() - a.vec().dot(b.vec());
  const Vec3 v = a.w() * b.vec() + b.w() * a.vec() + a.vec().cross(b.vec());
  return Quaternion(w, v.x(), v.y(), v.z());
}

Quaternion quat_inverse(const Quaternion& q) { return q.inverse(); }

RotationMatrix quat_to_rotmat(const Quaternion& q) {
  const Vec3 v = q.vec();
  const double w = q.w();
  return (w * w - v.squaredNorm()) * Mat3::Identity() + 2.0 * v * v.transpose() +
         2.0 * w * skew(v);
}

Quaternion rotvec_to_quat(const RotationVector& r) {
  const double angle = r.norm();
  // sin(angle / 2) / angle
  const double k = angle < 1e-6 ? 0.5 - angle * angle / 48.0 : std::sin(0.5 * angle) / angle;
  return Quaternion(std::cos(0.5 * angle), k * r.x(), k * r.y(), k * r.z());
}

RotationVector quat_to_rotvec(const Quaternion& q) {
  // w >= 0 by construction, so the angle 2*atan2(|v|, w) lies in [0, pi].
  const Vec3 v = q.vec();
  const double s = v.norm();
  const double w = q.w();
  if (s < 1e-6) {
    const double ratio = s / w;
    return (2.0 / w) * (1.0 - ratio * ratio / 3.0) * v;
  }
  return (2.0 * std::atan2(s, w) / s) * v;
}

RotationMatrix rotvec_to_rotmat(const RotationVector& r) {
  const double a2 = r.squaredNorm();
  const double a = std::sqrt(a2);
  double c1;
  double c2;
  if (a < 1e-5) {
    c1 = 1.0 - a2 / 6.0;
    c2 = 0.5 - a2 / 24.0;
  } else {
    c1 = std::sin(a) / a;
    c2 = (1.0 - std::cos(a)) / a2;
  }
  const Mat3 k = skew(r);
  return Mat3::Identity() + c1 * k + c2 * k * k;
}

RotationVector boxminus(const Quaternion& q1, const Quaternion& q2) {
  return quat_to_rotvec(q1 * q2.inverse());
}

Quaternion boxplus(const Quaternion& q, const RotationVector& r) { return rotvec_to_quat(r) * q; }

Quaternion boxminus(const Quaternion& q, const RotationVector& r) {
  return rotvec_to_quat(r).inverse() * q;
}

Quaternion quat_weighted_mean(std::span<const Quaternion> quats, std::span<const double> weights) {
  if (quats.empty() || quats.size() != weights.size()) {
    throw PreconditionError("quat_weighted_mean: need equal, non-empty quaternion and weight lists");
  }
  Mat4 d = Mat4::Zero();
  for (std::size_t i = 0; i < quats.size(); ++i) {
    if (!std::isfinite(weights[i])) {
      throw PreconditionError("quat_weighted_mean: non-finite weight");
    }
    const Vec4& c = quats[i].coeffs();
    d.noalias() += weights[i] * (c * c.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Mat4> solver(d);
  const Vec4& values = solver.eigenvalues();
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (std::abs(values[i]) > std::abs(values[best])) {
      best = i;
    }
  }
  double runner_up = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (i != best) {
      runner_up = std::max(runner_up, std::abs(values[i]));
    }
  }
  const double top = std::abs(values[best]);
  const double gap = top - runner_up;
  if (!(top > 0.0) || gap <= 1e-12 * top) {
    throw AmbiguityError("quat_weighted_mean: dominant eigenvalue is not unique (gap " +
                             std::to_string(gap) + ")",
                         gap);
  }
  return Quaternion(Vec4(solver.eigenvectors().col(best)));
}

}  // namespace quatnav
