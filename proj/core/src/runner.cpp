#include "quatnav/runner.hpp"

#include <algorithm>
#include <cmath>

#include "quatnav/ekf.hpp"
#include "quatnav/errors.hpp"

namespace quatnav {

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "qupf") {
    return FilterKind::Qupf;
  }
  if (name == "ekf") {
    return FilterKind::Ekf;
  }
  if (name == "deadreckon") {
    return FilterKind::DeadReckon;
  }
  throw ConfigError("unknown filter '" + std::string(name) + "' (expected qupf, ekf or deadreckon)");
}

std::string to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::Qupf:
      return "qupf";
    case FilterKind::Ekf:
      return "ekf";
    case FilterKind::DeadReckon:
      return "deadreckon";
  }
  return "unknown";
}

void validate_streams(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames) {
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (!(imu[i].t > imu[i - 1].t)) {
      throw OrderingError("<imu stream>", i + 1, 1,
                          "IMU record " + std::to_string(i) + " at t = " +
                              std::to_string(imu[i].t) + " does not follow t = " +
                              std::to_string(imu[i - 1].t));
    }
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].t > frames[i - 1].t)) {
      throw OrderingError("<landmark stream>", i + 1, 1,
                          "landmark frame " + std::to_string(i) + " at t = " +
                              std::to_string(frames[i].t) + " does not follow t = " +
                              std::to_string(frames[i - 1].t));
    }
  }
}

FrameSchedule schedule_frames(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames) {
  FrameSchedule schedule;
  schedule.frame_at_step.assign(imu.size(), -1);
  if (imu.empty()) {
    schedule.skipped = frames.size();
    return schedule;
  }
  auto spacing = [&](std::size_t k) {
    if (imu.size() == 1) {
      return 0.0;
    }
    const double before = k > 0 ? imu[k].t - imu[k - 1].t : 0.0;
    const double after = k + 1 < imu.size() ? imu[k + 1].t - imu[k].t : 0.0;
    return std::max(before, after);
  };
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const double t = frames[f].t;
    auto it = std::lower_bound(imu.begin(), imu.end(), t,
                               [](const ImuSample& s, double value) { return s.t < value; });
    std::size_t k = static_cast<std::size_t>(it - imu.begin());
    if (k == imu.size() || (k > 0 && t - imu[k - 1].t <= imu[k].t - t)) {
      k = k == 0 ? 0 : k - 1;
    }
    const double tolerance = 0.5 * spacing(k) + 1e-9;
    if (std::abs(imu[k].t - t) > tolerance || k == 0 || frames[f].landmarks.empty()) {
      ++schedule.skipped;
      continue;
    }
    if (schedule.frame_at_step[k] >= 0) {
      throw OrderingError("<landmark stream>", f + 1, 1,
                          "landmark frames " + std::to_string(schedule.frame_at_step[k]) +
                              " and " + std::to_string(f) + " align to the same IMU sample " +
                              std::to_string(k));
    }
    schedule.frame_at_step[k] = static_cast<int>(f);
  }
  return schedule;
}

FilterRun run_qupf(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames,
                   const FilterConfig& config, const RunOptions& options) {
  validate_streams(imu, frames);
  const FrameSchedule schedule = schedule_frames(imu, frames);
  const WorkerPool pool(options.threads);

  FilterRun run;
  run.skipped_frames = schedule.skipped;
  run.estimates.reserve(imu.size());
  Ensemble ensemble = initialize(config);
  for (std::size_t k = 0; k < imu.size(); ++k) {
    Estimate est;
    est.t = imu[k].t;
    if (k > 0) {
      predict_step(ensemble, imu[k - 1], imu[k].t - imu[k - 1].t, config, pool);
      if (const int f = schedule.frame_at_step[k]; f >= 0) {
        update_step(ensemble, frames[static_cast<std::size_t>(f)], config, pool);
        const ResampleOutcome r = resample_if_needed(ensemble, config);
        est.resampled = r.resampled;
        ++run.updates;
        run.resamples += r.resampled ? 1 : 0;
      }
    }
    std::vector<double> weights;
    weights.reserve(ensemble.particles.size());
    for (const auto& p : ensemble.particles) {
      weights.push_back(p.weight);
    }
    est.ess = effective_sample_size(weights);
    est.state = estimate(ensemble);
    run.estimates.push_back(est);
  }
  return run;
}

FilterRun run_ekf(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames,
                  const FilterConfig& config) {
  config.validate();
  validate_streams(imu, frames);
  const FrameSchedule schedule = schedule_frames(imu, frames);

  FilterRun run;
  run.skipped_frames = schedule.skipped;
  run.estimates.reserve(imu.size());
  EkfState state{config.init_mean, config.init_cov};
  WorldParams world = config.world;
  for (std::size_t k = 0; k < imu.size(); ++k) {
    if (k > 0) {
      world.dt = imu[k].t - imu[k - 1].t;
      state = ekf_predict(state, imu[k - 1], config.imu_noise, world);
      if (const int f = schedule.frame_at_step[k]; f >= 0) {
        const LandmarkFrame& frame = frames[static_cast<std::size_t>(f)];
        state = ekf_update(state, frame,
                           config.landmark_noise.covariance(frame.measurement_dim()));
        ++run.updates;
      }
    }
    run.estimates.push_back({imu[k].t, state.mean, 1.0, false});
  }
  return run;
}

FilterRun run_dead_reckoning(std::span<const ImuSample> imu, const FilterConfig& config) {
  config.validate();
  validate_streams(imu, {});
  FilterRun run;
  run.estimates.reserve(imu.size());
  NavState state = config.init_mean;
  WorldParams world = config.world;
  for (std::size_t k = 0; k < imu.size(); ++k) {
    if (k > 0) {
      world.dt = imu[k].t - imu[k - 1].t;
      const auto [omega, acc] = correct_inputs(imu[k - 1], {state.bias_gyro, state.bias_accel});
      state = propagate_exact(state, omega, acc, world);
    }
    run.estimates.push_back({imu[k].t, state, 1.0, false});
  }
  return run;
}

FilterRun run_filter(FilterKind kind, std::span<const ImuSample> imu,
                     std::span<const LandmarkFrame> frames, const FilterConfig& config,
                     const RunOptions& options) {
  switch (kind) {
    case FilterKind::Qupf:
      return run_qupf(imu, frames, config, options);
    case FilterKind::Ekf:
      return run_ekf(imu, frames, config);
    case FilterKind::DeadReckon: {
      FilterRun run = run_dead_reckoning(imu, config);
      run.skipped_frames = frames.size();
      return run;
    }
  }
  throw ConfigError("unknown filter kind");
}

}  // namespace quatnav
