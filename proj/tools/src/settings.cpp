#include "quatnav/cli/settings.hpp"

#include <algorithm>
#include <cmath>

#include "quatnav/errors.hpp"

namespace quatnav::cli {

ImuNoiseParams ImuSigmas::covariances() const {
  ImuNoiseParams n;
  n.gyro = Mat3::Identity() * gyro * gyro;
  n.accel = Mat3::Identity() * accel * accel;
  n.gyro_bias_walk = Mat3::Identity() * gyro_bias_walk * gyro_bias_walk;
  n.accel_bias_walk = Mat3::Identity() * accel_bias_walk * accel_bias_walk;
  return n;
}

namespace {

ImuNoiseParams read_imu_noise(const ConfigFile& f) {
  ImuSigmas s;
  s.gyro = f.number("imu_noise", "gyro_sigma", 0.0);
  s.accel = f.number("imu_noise", "accel_sigma", 0.0);
  s.gyro_bias_walk = f.number("imu_noise", "gyro_bias_walk_sigma", 0.0);
  s.accel_bias_walk = f.number("imu_noise", "accel_bias_walk_sigma", 0.0);
  if (s.gyro < 0 || s.accel < 0 || s.gyro_bias_walk < 0 || s.accel_bias_walk < 0) {
    throw ConfigError(f.origin() + ": noise standard deviations must be non-negative");
  }
  return s.covariances();
}

LandmarkNoise read_landmark_noise(const ConfigFile& f) {
  LandmarkNoise n;
  n.sigma = f.number("landmark_noise", "sigma", n.sigma);
  if (n.sigma < 0.0) {
    throw ConfigError(f.origin() + ": landmark_noise.sigma must be non-negative");
  }
  return n;
}

}  // namespace

SimulationSettings simulation_settings(const ConfigFile& f) {
  SimulationSettings s;
  TrajectorySpec& t = s.trajectory;
  t.duration = f.number("trajectory", "duration", t.duration);
  t.imu_rate = f.integer("trajectory", "imu_rate", t.imu_rate);
  t.cam_rate = f.integer("trajectory", "cam_rate", t.cam_rate);
  t.motion = parse_motion(f.string("trajectory", "motion", to_string(t.motion)));
  t.amplitude = f.number("trajectory", "amplitude", t.amplitude);
  t.angular_amplitude = f.number("trajectory", "angular_amplitude", t.angular_amplitude);
  t.rate = f.number("trajectory", "rate", t.rate);
  t.landmarks_per_frame = f.integer("trajectory", "landmarks_per_frame", t.landmarks_per_frame);
  t.landmark_box_min = f.vec3("trajectory", "landmark_box_min", t.landmark_box_min);
  t.landmark_box_max = f.vec3("trajectory", "landmark_box_max", t.landmark_box_max);
  t.gravity = f.vec3("trajectory", "gravity", t.gravity);
  s.sensors.imu_noise = read_imu_noise(f);
  s.sensors.initial_bias.gyro = f.vec3("bias", "gyro", Vec3::Zero());
  s.sensors.initial_bias.accel = f.vec3("bias", "accel", Vec3::Zero());
  s.sensors.landmark_noise = read_landmark_noise(f);
  f.reject_unknown();
  t.validate();
  s.echo = f.echo();
  return s;
}

SimulationSettings load_simulation_settings(const std::filesystem::path& file) {
  return simulation_settings(ConfigFile::load(file));
}

FilterSettings filter_settings(const ConfigFile& f) {
  FilterSettings s;
  if (f.has("filter", "kind")) {
    s.kind = parse_filter_kind(f.string("filter", "kind", ""));
  }
  FilterConfig& c = s.config;
  c.particles = f.integer("filter", "particles", c.particles);
  c.resample_threshold = f.number("filter", "resample_threshold", c.resample_threshold);
  c.epsilon = f.number("filter", "epsilon", c.epsilon);
  const double seed = f.number("filter", "seed", static_cast<double>(c.seed));
  if (seed < 0 || seed != std::floor(seed) || seed > 9007199254740992.0) {
    throw ConfigError(f.origin() + ": filter.seed must be a non-negative integer");
  }
  c.seed = static_cast<std::uint64_t>(seed);
  const std::string proposal = f.string("filter", "proposal", "standard");
  if (proposal == "standard") {
    c.proposal = ProposalMode::StandardUpf;
  } else if (proposal == "literal") {
    c.proposal = ProposalMode::Literal;
  } else {
    throw ConfigError(f.origin() + ": filter.proposal must be \"standard\" or \"literal\"");
  }
  c.tuning.lambda = f.number("ukf", "lambda", c.tuning.lambda);
  c.tuning.alpha = f.number("ukf", "alpha", c.tuning.alpha);
  c.tuning.beta = f.number("ukf", "beta", c.tuning.beta);
  c.imu_noise = read_imu_noise(f);
  c.landmark_noise = read_landmark_noise(f);
  c.world.gravity = f.vec3("world", "gravity", c.world.gravity);

  InitSettings& in = s.init;
  const std::string source = f.string("init", "source", "groundtruth");
  if (source == "groundtruth") {
    in.source = InitSource::GroundTruth;
  } else if (source == "explicit") {
    in.source = InitSource::Explicit;
  } else {
    throw ConfigError(f.origin() + ": init.source must be \"groundtruth\" or \"explicit\"");
  }
  in.rotation_offset = f.vec3("init", "rotation_offset", in.rotation_offset);
  in.position_offset = f.vec3("init", "position_offset", in.position_offset);
  in.velocity_offset = f.vec3("init", "velocity_offset", in.velocity_offset);
  in.mean.q = Quaternion(f.vec4("init", "q", Vec4(1.0, 0.0, 0.0, 0.0)));
  in.mean.p = f.vec3("init", "p", Vec3::Zero());
  in.mean.v = f.vec3("init", "v", Vec3::Zero());
  in.mean.bias_gyro = f.vec3("init", "bias_gyro", Vec3::Zero());
  in.mean.bias_accel = f.vec3("init", "bias_accel", Vec3::Zero());
  in.sigma_rotation = f.number("init", "sigma_rotation", in.sigma_rotation);
  in.sigma_position = f.number("init", "sigma_position", in.sigma_position);
  in.sigma_velocity = f.number("init", "sigma_velocity", in.sigma_velocity);
  in.sigma_bias_gyro = f.number("init", "sigma_bias_gyro", in.sigma_bias_gyro);
  in.sigma_bias_accel = f.number("init", "sigma_bias_accel", in.sigma_bias_accel);

  s.evaluation.convergence_threshold =
      f.number("evaluation", "convergence_threshold", s.evaluation.convergence_threshold);
  s.evaluation.window_start = f.number("evaluation", "window_start", s.evaluation.window_start);
  f.reject_unknown();

  for (double sigma : {in.sigma_rotation, in.sigma_position, in.sigma_velocity,
                       in.sigma_bias_gyro, in.sigma_bias_accel}) {
    if (!(sigma >= 0.0)) {
      throw ConfigError(f.origin() + ": init sigmas must be non-negative");
    }
  }
  c.init_mean = in.mean;
  c.init_cov = initial_covariance(in);
  c.validate();
  s.echo = f.echo();
  return s;
}

FilterSettings load_filter_settings(const std::filesystem::path& file) {
  FilterSettings s = filter_settings(ConfigFile::load(file));
  s.source = file.string();
  return s;
}

ErrorCov initial_covariance(const InitSettings& in) {
  ErrorVec sd;
  sd << Vec3::Constant(in.sigma_rotation), Vec3::Constant(in.sigma_position),
      Vec3::Constant(in.sigma_velocity), Vec3::Constant(in.sigma_bias_gyro),
      Vec3::Constant(in.sigma_bias_accel);
  return sd.cwiseProduct(sd).asDiagonal();
}

FilterConfig resolve_initial_state(const FilterSettings& settings, double t0,
                                   std::span<const TimedState> truth) {
  FilterConfig c = settings.config;
  const InitSettings& in = settings.init;
  c.init_cov = initial_covariance(in);

  c.init_mean = in.mean;
  if (in.source == InitSource::GroundTruth && !truth.empty()) {
    auto it = std::min_element(truth.begin(), truth.end(), [t0](const auto& a, const auto& b) {
      return std::abs(a.t - t0) < std::abs(b.t - t0);
    });
    c.init_mean.q = boxplus(it->state.q, in.rotation_offset);
    c.init_mean.p = it->state.p + in.position_offset;
    c.init_mean.v = it->state.v + in.velocity_offset;
  } else if (in.source == InitSource::GroundTruth) {
    throw ConfigError("init.source = \"groundtruth\" but the dataset has no ground truth");
  }
  return c;
}

}  // namespace quatnav::cli
