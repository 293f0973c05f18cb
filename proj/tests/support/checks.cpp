#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "quatnav/linalg.hpp"
#include "quatnav/random.hpp"
#include "quatnav/runner.hpp"

namespace quatnav::test {

namespace {

double quat_gap(const Vec4& a, const Vec4& b) { return std::min((a - b).norm(), (a + b).norm()); }

}  // namespace

double propagate_oracle_gap(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(1e-3, 0.2);
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const NavState x = random_state(rng);
    const Vec3 w = random_vec3(rng, 2.0);
    const Vec3 a = random_vec3(rng, 15.0);
    WorldParams world;
    world.dt = step(rng);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(11, 11);
    m.block<4, 4>(0, 0) = 0.5 * gamma(w);
    m.block<3, 3>(4, 7) = Mat3::Identity();
    m.block<3, 1>(7, 10) = world.gravity + rodrigues(quat_to_rotvec(x.q)) * a;
    Eigen::VectorXd s(11);
    s << x.q.coeffs(), x.p, x.v, 1.0;
    const Eigen::VectorXd e = expm(m * world.dt) * s;
    const NavState got = propagate_exact(x, w, a, world);
    // per component, up to the global quaternion sign
    const Vec4 qe = e.head<4>().dot(got.q.coeffs()) < 0 ? Vec4(-e.head<4>()) : Vec4(e.head<4>());
    worst = std::max(worst, (got.q.coeffs() - qe).cwiseAbs().maxCoeff());
    worst = std::max(worst, (got.p - e.segment<3>(4)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (got.v - e.segment<3>(7)).cwiseAbs().maxCoeff());
  }
  return worst;
}

LinearGap linear_submodel_gap(int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double dt = 0.01;
  const double tiny = 1e-16;
  WorldParams world;
  world.dt = dt;

  ImuNoiseParams noise;
  noise.gyro = Mat3::Identity() * tiny;
  noise.accel = Mat3::Identity() * 0.04;
  const double sigma_f = 0.05;

  Eigen::MatrixXd p0 = Eigen::MatrixXd::Zero(6, 6);
  p0.topLeftCorner(3, 3) = Mat3::Identity() * 0.25;
  p0.bottomRightCorner(3, 3) = Mat3::Identity() * 0.09;
  p0(0, 3) = p0(3, 0) = 0.05;

  ErrorCov full = ErrorCov::Identity() * tiny;
  full.block<6, 6>(3, 3) = p0;

  NavState mean;
  mean.p = Vec3(1.0, -2.0, 0.5);
  mean.v = Vec3(0.3, 0.1, -0.2);

  LinearKf kf;
  kf.x.resize(6);
  kf.x << mean.p, mean.v;
  kf.p = p0;
  Eigen::MatrixXd f = Eigen::MatrixXd::Identity(6, 6);
  f.topRightCorner(3, 3) = Mat3::Identity() * dt;
  Eigen::MatrixXd g(6, 3);
  g << -0.5 * dt * dt * Mat3::Identity(), -dt * Mat3::Identity();
  const Eigen::MatrixXd q = g * noise.accel * g.transpose();

  UkfMoments ukf{mean, full};
  EkfState ekf{mean, full};
  const UkfTuning tuning;

  Vec3 p_true = mean.p;
  Vec3 v_true = mean.v;
  LinearGap gap;
  for (int k = 0; k < steps; ++k) {
    ImuSample u;
    u.accel = -world.gravity + Vec3(std::sin(0.1 * k), 0.5, -0.3 * std::cos(0.05 * k));
    const Vec3 c = world.gravity + u.accel;
    p_true += dt * v_true + 0.5 * dt * dt * c;
    v_true += dt * c;

    Eigen::VectorXd control(6);
    control << 0.5 * dt * dt * c, dt * c;
    kf.predict(f, control, q);
    const TimeUpdateResult tu = time_update(sigma_points(augment(ukf, noise), tuning), u, world, noise);
    ekf = ekf_predict(ekf, u, noise, world);

    LandmarkFrame frame;
    for (int i = 0; i < 3; ++i) {
      const Vec3 fw = random_vec3(rng, 8.0);
      const Vec3 n(normal(rng), normal(rng), normal(rng));
      frame.landmarks.push_back({i, fw, fw - p_true + sigma_f * n});
    }
    const Eigen::VectorXd z = frame.stacked_body();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(9, 6);
    Eigen::VectorXd z_offset(9);
    for (int i = 0; i < 3; ++i) {
      h.block<3, 3>(3 * i, 0) = -Mat3::Identity();
      z_offset.segment<3>(3 * i) = frame.landmarks[static_cast<std::size_t>(i)].world;
    }
    const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(9, 9) * sigma_f * sigma_f;
    kf.update(h, z - z_offset, r);
    const std::vector<Vec3> pts = frame.world_points();
    ukf = measurement_update(tu.predicted, tu.points, z, pts, r).posterior;
    ekf = ekf_update(ekf, frame, r);

    Eigen::VectorXd xu(6);
    xu << ukf.mean.p, ukf.mean.v;
    Eigen::VectorXd xe(6);
    xe << ekf.mean.p, ekf.mean.v;
    gap.ukf_mean = std::max(gap.ukf_mean, (xu - kf.x).cwiseAbs().maxCoeff());
    gap.ekf_mean = std::max(gap.ekf_mean, (xe - kf.x).cwiseAbs().maxCoeff());
    gap.ukf_cov = std::max(gap.ukf_cov, (Eigen::MatrixXd(ukf.cov.block<6, 6>(3, 3)) - kf.p).cwiseAbs().maxCoeff());
    gap.ekf_cov = std::max(gap.ekf_cov, (Eigen::MatrixXd(ekf.cov.block<6, 6>(3, 3)) - kf.p).cwiseAbs().maxCoeff());
  }
  return gap;
}

namespace {

Eigen::Matrix<double, kAugmentedDim, 1> augmented_difference(const AugmentedPoint& pt,
                                                              const AugmentedMoments& aug) {
  Eigen::Matrix<double, kAugmentedDim, 1> d;
  d.head<kErrorDim>() = state_difference(pt.state, aug.mean);
  d.segment<3>(kErrorDim) = pt.gyro_noise - aug.noise_mean.head<3>();
  d.segment<3>(kErrorDim + 3) = pt.accel_noise - aug.noise_mean.tail<3>();
  return d;
}

ErrorCov random_error_cov(std::mt19937_64& rng, double attitude_sigma) {
  Eigen::MatrixXd a = random_spd(rng, kErrorDim, 1.0);
  // correlation structure of a random SPD, rescaled to the wanted spreads
  const Eigen::VectorXd d = a.diagonal().cwiseSqrt().cwiseInverse();
  a = d.asDiagonal() * a * d.asDiagonal();
  Eigen::VectorXd s(kErrorDim);
  s << Vec3::Constant(attitude_sigma), Vec3::Constant(0.3), Vec3::Constant(0.2),
      Vec3::Constant(0.01), Vec3::Constant(0.05);
  return s.asDiagonal() * a * s.asDiagonal();
}

}  // namespace

ReconstructionGap sigma_reconstruction_gap(std::uint64_t seed, double attitude_sigma) {
  std::mt19937_64 rng(seed);
  UkfMoments m{random_state(rng), random_error_cov(rng, attitude_sigma)};
  ImuNoiseParams noise;
  noise.gyro = random_spd(rng, 3, 1e-4);
  noise.accel = random_spd(rng, 3, 1e-2);
  const AugmentedMoments aug = augment(m, noise);
  const SigmaPointSet set = sigma_points(aug, UkfTuning{});

  Eigen::Matrix<double, kAugmentedDim, 1> mean = Eigen::Matrix<double, kAugmentedDim, 1>::Zero();
  AugmentedCov cov = AugmentedCov::Zero();
  for (int j = 0; j < kSigmaCount; ++j) {
    const auto d = augmented_difference(set.points[static_cast<std::size_t>(j)], aug);
    mean += set.weights.mean(j) * d;
    cov += set.weights.cov(j) * d * d.transpose();
  }
  return {mean.cwiseAbs().maxCoeff(), (cov - aug.cov).norm()};
}

MomentMatch unscented_vs_monte_carlo(int samples, std::uint64_t seed, double attitude_sigma) {
  std::mt19937_64 rng(seed);
  NavState x0 = random_state(rng);
  ErrorCov p0 = random_error_cov(rng, attitude_sigma);
  ImuNoiseParams noise;
  noise.gyro = Mat3::Identity() * 1e-4;
  noise.accel = Mat3::Identity() * 1e-2;
  WorldParams world;
  world.dt = 0.1;
  ImuSample u;
  u.gyro = Vec3(0.4, -0.3, 0.8);
  u.accel = Vec3(2.0, -1.0, 9.0);

  const AugmentedMoments aug = augment({x0, p0}, noise);
  const TimeUpdateResult tu = time_update(sigma_points(aug, UkfTuning{}), u, world, noise);

  const Eigen::MatrixXd root = aug.cov.llt().matrixL();
  std::normal_distribution<double> normal;
  Eigen::Matrix<double, kErrorDim, 1> sum = Eigen::Matrix<double, kErrorDim, 1>::Zero();
  Eigen::Matrix<double, kErrorDim, 1> sum2 = sum;
  Eigen::Matrix<double, kErrorDim, 1> sum4 = sum;
  std::vector<ErrorVec> draws(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    Eigen::Matrix<double, kAugmentedDim, 1> z;
    for (int i = 0; i < kAugmentedDim; ++i) z[i] = normal(rng);
    const Eigen::Matrix<double, kAugmentedDim, 1> d = root * z;
    const NavState x = state_boxplus(x0, d.head<kErrorDim>());
    const auto [omega, acc] = correct_inputs(u, {x.bias_gyro, x.bias_accel}, d.segment<3>(15),
                                             d.segment<3>(18));
    draws[static_cast<std::size_t>(s)] = state_difference(propagate_exact(x, omega, acc, world), tu.predicted.mean);
    sum += draws[static_cast<std::size_t>(s)];
  }
  const double n = samples;
  const ErrorVec mc_mean = sum / n;
  for (const auto& e : draws) {
    const ErrorVec c = e - mc_mean;
    sum2 += c.cwiseProduct(c);
    sum4 += c.cwiseProduct(c).cwiseProduct(c).cwiseProduct(c);
  }
  const ErrorVec var = sum2 / (n - 1.0);
  const ErrorVec m4 = sum4 / n;

  MomentMatch out;
  for (int i = 0; i < kErrorDim; ++i) {
    const double se_mean = std::sqrt(var[i] / n);
    // the unscented mean sits at zero in its own chart
    out.worst_mean_z = std::max(out.worst_mean_z, std::abs(mc_mean[i]) / se_mean);
    const double se_var = std::sqrt((m4[i] - var[i] * var[i]) / n);
    out.worst_var_z = std::max(out.worst_var_z, std::abs(var[i] - tu.predicted.cov(i, i)) / se_var);
  }
  return out;
}

JacobianGap ekf_jacobian_gap(const NavState& x, const ImuSample& u, double dt,
                             std::span<const Vec3> world_points) {
  WorldParams world;
  world.dt = dt;
  auto step = [&](const NavState& s, const Vec3& nw, const Vec3& na) {
    const auto [omega, acc] = correct_inputs(u, {s.bias_gyro, s.bias_accel}, nw, na);
    return propagate_exact(s, omega, acc, world);
  };
  const NavState nominal = step(x, Vec3::Zero(), Vec3::Zero());
  const double h = 1e-6;

  const Eigen::MatrixXd f_fd = numerical_jacobian(
      [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
        return state_difference(step(state_boxplus(x, ErrorVec(d)), Vec3::Zero(), Vec3::Zero()), nominal);
      },
      Eigen::VectorXd::Zero(kErrorDim), h);
  const Eigen::MatrixXd g_fd = numerical_jacobian(
      [&](const Eigen::VectorXd& n) -> Eigen::VectorXd {
        return state_difference(step(x, n.head<3>(), n.tail<3>()), nominal);
      },
      Eigen::VectorXd::Zero(kNoiseDim), h);
  const Eigen::MatrixXd h_fd = numerical_jacobian(
      [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
        return landmark_h(state_boxplus(x, ErrorVec(d)), world_points);
      },
      Eigen::VectorXd::Zero(kErrorDim), h);

  const EkfJacobians j = ekf_jacobians(x, u, dt);
  JacobianGap gap;
  gap.transition = (Eigen::MatrixXd(j.transition) - f_fd).cwiseAbs().maxCoeff();
  gap.noise = (Eigen::MatrixXd(j.noise) - g_fd).cwiseAbs().maxCoeff();
  gap.measurement = (landmark_jacobian(x, world_points) - h_fd).cwiseAbs().maxCoeff();
  return gap;
}

std::vector<NavState> hand_driven_single_ukf(std::span<const ImuSample> imu,
                                             std::span<const LandmarkFrame> frames,
                                             const FilterConfig& config) {
  // substream tags used by the particle layer for the initial and proposal draws
  constexpr std::uint64_t init_tag = 1;
  constexpr std::uint64_t proposal_tag = 2;

  const FrameSchedule schedule = schedule_frames(imu, frames);
  auto init_rng = RandomStream::substream(config.seed, 0, 0, init_tag);
  NavState sample = state_boxplus(config.init_mean, init_rng.gaussian(robust_cholesky(config.init_cov)));
  UkfMoments ukf{sample, config.init_cov};
  std::uint64_t step = 0;

  std::vector<NavState> out;
  out.reserve(imu.size());
  for (std::size_t k = 0; k < imu.size(); ++k) {
    if (k > 0) {
      WorldParams world = config.world;
      world.dt = imu[k].t - imu[k - 1].t;
      const TimeUpdateResult tu =
          time_update(sigma_points(augment(ukf, config.imu_noise), config.tuning), imu[k - 1], world,
                      config.imu_noise);
      ++step;
      ukf = tu.predicted;
      sample = ukf.mean;
      if (const int f = schedule.frame_at_step[k]; f >= 0) {
        const LandmarkFrame& frame = frames[static_cast<std::size_t>(f)];
        const Eigen::MatrixXd r = config.landmark_noise.covariance(frame.measurement_dim());
        ukf = measurement_update(ukf, tu.points, frame.stacked_body(), frame.world_points(), r).posterior;
        auto rng = RandomStream::substream(config.seed, step, 0, proposal_tag);
        sample = state_boxplus(ukf.mean, rng.gaussian(robust_cholesky(ukf.cov)));
        ukf.mean = sample;
      }
    }
    out.push_back(sample);
  }
  return out;
}

Scenario small_scenario(double duration, int particles, std::uint64_t seed) {
  Scenario s;
  s.spec.duration = duration;
  s.spec.landmarks_per_frame = 8;
  s.trajectory = generate_trajectory(s.spec);
  SensorSpec sensors;
  sensors.imu_noise.gyro = Mat3::Identity() * 2.4e-3 * 2.4e-3;
  sensors.imu_noise.accel = Mat3::Identity() * 0.028 * 0.028;
  sensors.imu_noise.gyro_bias_walk = Mat3::Identity() * 1.3e-6 * 1.3e-6;
  sensors.imu_noise.accel_bias_walk = Mat3::Identity() * 2.1e-4 * 2.1e-4;
  sensors.initial_bias.gyro = Vec3(0.002, -0.001, 0.0015);
  sensors.initial_bias.accel = Vec3(0.03, -0.02, 0.05);
  sensors.landmark_noise.sigma = 0.02;
  s.sensors = synthesize_sensors(s.trajectory, sensors, s.spec, seed);

  FilterConfig& c = s.config;
  c.particles = particles;
  c.resample_threshold = 0.5 * particles;
  c.imu_noise = sensors.imu_noise;
  c.landmark_noise = sensors.landmark_noise;
  c.seed = seed;
  c.init_mean = s.trajectory.truth.front().state;
  c.init_mean.q = boxplus(c.init_mean.q, Vec3(0.05, -0.03, 0.02));
  c.init_mean.p += Vec3(0.1, -0.1, 0.05);
  Eigen::Matrix<double, kErrorDim, 1> sd;
  sd << Vec3::Constant(0.1), Vec3::Constant(0.2), Vec3::Constant(0.1), Vec3::Constant(0.01),
      Vec3::Constant(0.1);
  c.init_cov = sd.cwiseAbs2().asDiagonal();
  return s;
}

}  // namespace quatnav::test
