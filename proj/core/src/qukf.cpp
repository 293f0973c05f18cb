#include "quatnav/qukf.hpp"

#include <cmath>
#include <string>

#include "quatnav/errors.hpp"
#include "quatnav/linalg.hpp"

namespace quatnav {

ErrorVec state_difference(const NavState& a, const NavState& b) {
  ErrorVec d;
  d.segment<3>(0) = boxminus(a.q, b.q);
  d.segment<3>(3) = a.p - b.p;
  d.segment<3>(6) = a.v - b.v;
  d.segment<3>(9) = a.bias_gyro - b.bias_gyro;
  d.segment<3>(12) = a.bias_accel - b.bias_accel;
  return d;
}

NavState state_boxplus(const NavState& x, const ErrorVec& dx) {
  NavState out;
  out.q = boxplus(x.q, RotationVector(dx.segment<3>(0)));
  out.p = x.p + dx.segment<3>(3);
  out.v = x.v + dx.segment<3>(6);
  out.bias_gyro = x.bias_gyro + dx.segment<3>(9);
  out.bias_accel = x.bias_accel + dx.segment<3>(12);
  return out;
}

ErrorVec to_chart(const NavState& x) {
  ErrorVec c;
  c << quat_to_rotvec(x.q), x.p, x.v, x.bias_gyro, x.bias_accel;
  return c;
}

NavState from_chart(const ErrorVec& chart) {
  NavState x;
  x.q = rotvec_to_quat(chart.segment<3>(0));
  x.p = chart.segment<3>(3);
  x.v = chart.segment<3>(6);
  x.bias_gyro = chart.segment<3>(9);
  x.bias_accel = chart.segment<3>(12);
  return x;
}

void UkfTuning::validate() const {
  if (!(lambda + kAugmentedDim > 0.0)) {
    throw PreconditionError("UKF tuning: lambda + 21 must be positive (lambda = " +
                            std::to_string(lambda) + ")");
  }
}

SigmaWeights SigmaWeights::from(const UkfTuning& tuning) {
  tuning.validate();
  const double n = kAugmentedDim;
  SigmaWeights w;
  w.mean0 = tuning.lambda / (tuning.lambda + n);
  w.cov0 = w.mean0 + 1.0 - tuning.alpha * tuning.alpha + tuning.beta;
  w.other = 1.0 / (2.0 * (n + tuning.lambda));
  return w;
}

std::array<double, kSigmaCount> SigmaWeights::mean_weights() const {
  std::array<double, kSigmaCount> out;
  for (int j = 0; j < kSigmaCount; ++j) {
    out[j] = mean(j);
  }
  return out;
}

std::array<double, kSigmaCount> SigmaWeights::cov_weights() const {
  std::array<double, kSigmaCount> out;
  for (int j = 0; j < kSigmaCount; ++j) {
    out[j] = cov(j);
  }
  return out;
}

AugmentedMoments augment(const UkfMoments& moments, const ImuNoiseParams& noise) {
  AugmentedMoments aug;
  aug.mean = moments.mean;
  aug.cov.setZero();
  aug.cov.topLeftCorner<kErrorDim, kErrorDim>() = moments.cov;
  aug.cov.block<3, 3>(kErrorDim, kErrorDim) = noise.gyro;
  aug.cov.block<3, 3>(kErrorDim + 3, kErrorDim + 3) = noise.accel;
  return aug;
}

namespace {

AugmentedPoint displace(const AugmentedMoments& aug, const AugmentedVec& d, double sign) {
  AugmentedPoint pt;
  const RotationVector r = d.segment<3>(0);
  pt.state.q = sign > 0 ? boxplus(aug.mean.q, r) : boxminus(aug.mean.q, r);
  pt.state.p = aug.mean.p + sign * d.segment<3>(3);
  pt.state.v = aug.mean.v + sign * d.segment<3>(6);
  pt.state.bias_gyro = aug.mean.bias_gyro + sign * d.segment<3>(9);
  pt.state.bias_accel = aug.mean.bias_accel + sign * d.segment<3>(12);
  pt.gyro_noise = aug.noise_mean.head<3>() + sign * d.segment<3>(15);
  pt.accel_noise = aug.noise_mean.tail<3>() + sign * d.segment<3>(18);
  return pt;
}

}  // namespace

SigmaPointSet sigma_points(const AugmentedMoments& aug, const UkfTuning& tuning) {
  SigmaPointSet set;
  set.weights = SigmaWeights::from(tuning);
  const AugmentedCov root = std::sqrt(kAugmentedDim + tuning.lambda) * robust_cholesky(aug.cov);
  set.points[0].state = aug.mean;
  set.points[0].gyro_noise = aug.noise_mean.head<3>();
  set.points[0].accel_noise = aug.noise_mean.tail<3>();
  for (int j = 0; j < kAugmentedDim; ++j) {
    const AugmentedVec column = root.col(j);
    set.points[1 + j] = displace(aug, column, 1.0);
    set.points[1 + kAugmentedDim + j] = displace(aug, column, -1.0);
  }
  return set;
}

TimeUpdateResult time_update(const SigmaPointSet& sigma, const ImuSample& u,
                             const WorldParams& world, const ImuNoiseParams& noise) {
  TimeUpdateResult out;
  out.points.weights = sigma.weights;
  std::array<Quaternion, kSigmaCount> quats;
  for (int j = 0; j < kSigmaCount; ++j) {
    const AugmentedPoint& pt = sigma.points[j];
    const ImuBias bias{pt.state.bias_gyro, pt.state.bias_accel};
    const auto [omega, acc] = correct_inputs(u, bias, pt.gyro_noise, pt.accel_noise);
    out.points.states[j] = propagate_exact(pt.state, omega, acc, world);
    quats[j] = out.points.states[j].q;
  }

  const auto wm = sigma.weights.mean_weights();
  NavState& mean = out.predicted.mean;
  mean.q = quat_weighted_mean(quats, wm);
  mean.p.setZero();
  mean.v.setZero();
  mean.bias_gyro.setZero();
  mean.bias_accel.setZero();
  for (int j = 0; j < kSigmaCount; ++j) {
    const NavState& s = out.points.states[j];
    mean.p += wm[j] * s.p;
    mean.v += wm[j] * s.v;
    mean.bias_gyro += wm[j] * s.bias_gyro;
    mean.bias_accel += wm[j] * s.bias_accel;
  }

  ErrorCov cov = ErrorCov::Zero();
  for (int j = 0; j < kSigmaCount; ++j) {
    const ErrorVec d = state_difference(out.points.states[j], mean);
    cov.noalias() += sigma.weights.cov(j) * (d * d.transpose());
  }
  cov.block<3, 3>(9, 9) += noise.gyro_bias_walk;
  cov.block<3, 3>(12, 12) += noise.accel_bias_walk;
  out.predicted.cov = 0.5 * (cov + cov.transpose());
  return out;
}

MeasurementUpdateResult measurement_update(const UkfMoments& predicted,
                                           const PropagatedPoints& points,
                                           const Eigen::VectorXd& z,
                                           std::span<const Vec3> world_points,
                                           const Eigen::MatrixXd& landmark_cov) {
  const Eigen::Index m = z.size();
  if (m == 0) {
    throw PreconditionError("measurement_update: empty measurement");
  }
  if (m != 3 * static_cast<Eigen::Index>(world_points.size()) || landmark_cov.rows() != m ||
      landmark_cov.cols() != m) {
    throw PreconditionError("measurement_update: dimension mismatch");
  }

  const SigmaWeights& w = points.weights;
  Eigen::MatrixXd zs(m, kSigmaCount);
  Eigen::Matrix<double, kErrorDim, kSigmaCount> xs;
  Eigen::VectorXd z_hat = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < kSigmaCount; ++j) {
    zs.col(j) = landmark_h(points.states[j], world_points);
    z_hat += w.mean(j) * zs.col(j);
    xs.col(j) = state_difference(points.states[j], predicted.mean);
  }
  zs.colwise() -= z_hat;
  const auto wc = w.cov_weights();
  const Eigen::Map<const Eigen::Matrix<double, kSigmaCount, 1>> wc_vec(wc.data());

  const Eigen::MatrixXd weighted_z = zs * wc_vec.asDiagonal();
  Eigen::MatrixXd p_zz = weighted_z * zs.transpose() + landmark_cov;
  p_zz = 0.5 * (p_zz + p_zz.transpose());
  const Eigen::Matrix<double, kErrorDim, Eigen::Dynamic> p_xz = xs * weighted_z.transpose();

  const Eigen::MatrixXd lower = robust_cholesky(p_zz);
  if ((lower.diagonal().array() <= 0.0).any()) {
    throw NumericalError("measurement_update: singular innovation covariance", 0);
  }
  // K^T = P_zz^-1 P_xz^T
  Eigen::MatrixXd gain_t = lower.triangularView<Eigen::Lower>().solve(p_xz.transpose());
  lower.triangularView<Eigen::Lower>().transpose().solveInPlace(gain_t);
  const Eigen::Matrix<double, kErrorDim, Eigen::Dynamic> gain = gain_t.transpose();

  MeasurementUpdateResult out;
  const ErrorCov shrink = gain * p_zz * gain.transpose();
  const ErrorCov cov = predicted.cov - shrink;
  out.posterior.cov = 0.5 * (cov + cov.transpose());
  const ErrorVec correction = gain * (z - z_hat);
  out.posterior.mean = state_boxplus(predicted.mean, correction);
  out.predicted_measurement = std::move(z_hat);
  out.innovation_cov = std::move(p_zz);
  return out;
}

}  // namespace quatnav
