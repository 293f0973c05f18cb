#include "quatnav/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "quatnav/errors.hpp"
#include "quatnav/random.hpp"

namespace quatnav {

Motion parse_motion(std::string_view name) {
  if (name == "figure-eight") {
    return Motion::FigureEight;
  }
  if (name == "circle") {
    return Motion::Circle;
  }
  if (name == "hover-then-dash") {
    return Motion::HoverThenDash;
  }
  throw ConfigError("unknown motion '" + std::string(name) +
                    "' (expected figure-eight, circle or hover-then-dash)");
}

std::string to_string(Motion motion) {
  switch (motion) {
    case Motion::FigureEight:
      return "figure-eight";
    case Motion::Circle:
      return "circle";
    case Motion::HoverThenDash:
      return "hover-then-dash";
  }
  return "unknown";
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0)) {
    throw ConfigError("duration must be positive");
  }
  if (imu_rate <= 0 || cam_rate <= 0 || imu_rate % cam_rate != 0) {
    throw ConfigError("imu_rate must be a positive integer multiple of cam_rate");
  }
  if (landmarks_per_frame < 0) {
    throw ConfigError("landmark count must be non-negative");
  }
  if ((landmark_box_max.array() < landmark_box_min.array()).any()) {
    throw ConfigError("landmark box bounds are inverted");
  }
}

std::size_t TrajectorySpec::imu_samples() const {
  return static_cast<std::size_t>(std::llround(duration * imu_rate));
}

std::size_t TrajectorySpec::camera_frames() const {
  return static_cast<std::size_t>(std::llround(duration * cam_rate));
}

std::size_t TrajectorySpec::imu_per_frame() const {
  return static_cast<std::size_t>(imu_rate / cam_rate);
}

namespace {

// value, first and second derivative of a scalar profile
struct Profile {
  double f = 0.0;
  double d = 0.0;
  double dd = 0.0;
};

Profile sine(double amp, double freq, double phase, double t) {
  const double s = std::sin(freq * t + phase);
  const double c = std::cos(freq * t + phase);
  return {amp * s, amp * freq * c, -amp * freq * freq * s};
}

Quaternion euler_zyx(double roll, double pitch, double yaw) {
  const Quaternion qz(std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw));
  const Quaternion qy(std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0);
  const Quaternion qx(std::cos(0.5 * roll), std::sin(0.5 * roll), 0.0, 0.0);
  return qz * qy * qx;
}

// Body rates of R = Rz(yaw) Ry(pitch) Rx(roll).
Vec3 euler_body_rates(const Profile& roll, const Profile& pitch, const Profile& yaw) {
  const double sr = std::sin(roll.f);
  const double cr = std::cos(roll.f);
  const double sp = std::sin(pitch.f);
  const double cp = std::cos(pitch.f);
  return {roll.d - yaw.d * sp, pitch.d * cr + yaw.d * cp * sr, -pitch.d * sr + yaw.d * cp * cr};
}

}  // namespace

MotionSample sample_motion(const TrajectorySpec& spec, double t) {
  const double a = spec.amplitude;
  const double w = spec.rate;
  const double ang = spec.angular_amplitude;
  Profile px;
  Profile py;
  Profile pz;
  Profile roll;
  Profile pitch;
  Profile yaw;
  switch (spec.motion) {
    case Motion::FigureEight:
      px = sine(a, w, 0.0, t);
      py = sine(0.5 * a, 2.0 * w, 0.0, t);
      pz = sine(0.3 * a, 1.5 * w, 0.0, t);
      roll = sine(0.5 * ang, 2.0 * w, 0.3, t);
      pitch = sine(0.5 * ang, 1.5 * w, 0.0, t);
      yaw = sine(ang, w, 0.0, t);
      break;
    case Motion::Circle:
      px = sine(a, w, 0.5 * std::numbers::pi, t);
      py = sine(a, w, 0.0, t);
      roll = sine(0.5 * ang, 2.0 * w, 0.3, t);
      pitch = sine(0.5 * ang, 1.5 * w, 0.0, t);
      yaw = {w * t, w, 0.0};
      break;
    case Motion::HoverThenDash: {
      // Level hover at a fixed heading, then a smooth quintic dash along x.
      yaw = {ang, 0.0, 0.0};
      const double hover = 0.5 * spec.duration;
      const double span = spec.duration - hover;
      if (t > hover) {
        const double u = std::min((t - hover) / span, 1.0);
        const double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
        const double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u) / span;
        const double dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (span * span);
        px = {a * s, a * ds, a * dds};
      }
      break;
    }
  }
  MotionSample out;
  out.q = euler_zyx(roll.f, pitch.f, yaw.f);
  out.p = {px.f, py.f, pz.f};
  out.v = {px.d, py.d, pz.d};
  out.accel_world = {px.dd, py.dd, pz.dd};
  out.omega_body = euler_body_rates(roll, pitch, yaw);
  return out;
}

Trajectory generate_trajectory(const TrajectorySpec& spec) {
  spec.validate();
  const std::size_t n = spec.imu_samples();
  const double dt = 1.0 / spec.imu_rate;
  Trajectory traj;
  traj.truth.reserve(n);
  traj.rates.reserve(n);
  MotionSample current = sample_motion(spec, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const MotionSample next = sample_motion(spec, static_cast<double>(k + 1) * dt);
    TimedState ts;
    ts.t = t;
    ts.state.q = current.q;
    ts.state.p = current.p;
    ts.state.v = current.v;
    traj.truth.push_back(ts);

    TrueRates r;
    r.omega = quat_to_rotvec(current.q.inverse() * next.q) / dt;
    r.acc = quat_to_rotmat(current.q).transpose() * ((next.v - current.v) / dt - spec.gravity);
    traj.rates.push_back(r);
    current = next;
  }
  return traj;
}

SensorStreams synthesize_sensors(const Trajectory& trajectory, const SensorSpec& sensors,
                                 const TrajectorySpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t n = trajectory.truth.size();
  if (trajectory.rates.size() != n) {
    throw PreconditionError("synthesize_sensors: truth and rates differ in length");
  }
  SensorStreams out;
  out.imu.reserve(n);
  out.bias.reserve(n);
  RandomStream imu_rng = RandomStream::substream(seed, 0, 0, 11);
  ImuBias bias = sensors.initial_bias;
  for (std::size_t k = 0; k < n; ++k) {
    out.bias.push_back(bias);
    const ImuForwardResult r = imu_forward_model(trajectory.truth[k].t, trajectory.rates[k].omega,
                                                 trajectory.rates[k].acc, bias,
                                                 sensors.imu_noise, imu_rng);
    out.imu.push_back(r.sample);
    bias = r.next_bias;
  }

  RandomStream landmark_rng = RandomStream::substream(seed, 0, 0, 12);
  const std::size_t stride = spec.imu_per_frame();
  const auto count = static_cast<std::size_t>(spec.landmarks_per_frame);
  const Eigen::Index m_z = 3 * static_cast<Eigen::Index>(count);
  Eigen::MatrixXd noise_root;
  if (count > 0) {
    noise_root = psd_sqrt(sensors.landmark_noise.covariance(m_z));
  }
  const Vec3 extent = spec.landmark_box_max - spec.landmark_box_min;
  long next_id = 0;
  for (std::size_t k = 0; k < n; k += stride) {
    const NavState& truth = trajectory.truth[k].state;
    LandmarkFrame frame;
    frame.t = trajectory.truth[k].t;
    frame.landmarks.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      Landmark l;
      l.id = next_id++;
      for (int axis = 0; axis < 3; ++axis) {
        l.world[axis] = spec.landmark_box_min[axis] + extent[axis] * landmark_rng.uniform();
      }
      frame.landmarks.push_back(l);
    }
    const std::vector<Vec3> points = frame.world_points();
    Eigen::VectorXd z = landmark_h(truth, points);
    if (count > 0) {
      z += landmark_rng.gaussian(noise_root);
    }
    for (std::size_t i = 0; i < count; ++i) {
      frame.landmarks[i].body = z.segment<3>(3 * static_cast<Eigen::Index>(i));
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace quatnav
