#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quatnav/qupf.hpp"

namespace quatnav {

enum class FilterKind { Qupf, Ekf, DeadReckon };

/// "qupf", "ekf" or "deadreckon"; throws ConfigError otherwise.
FilterKind parse_filter_kind(std::string_view name);
std::string to_string(FilterKind kind);

struct RunOptions {
  /// Worker threads for the particle layer; 0 = hardware default.
  int threads = 0;
};

struct FilterRun {
  /// One estimate per IMU sample, stamped with the sample time.
  std::vector<Estimate> estimates;
  std::size_t updates = 0;
  std::size_t resamples = 0;
  std::size_t skipped_frames = 0;
};

/// Throws OrderingError naming the first IMU record whose timestamp does not
/// increase, or the first landmark frame that goes back in time.
void validate_streams(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames);

struct FrameSchedule {
  /// For each IMU index, the landmark frame due at that step or -1.
  std::vector<int> frame_at_step;
  /// Frames outside the IMU span, aligned to the first sample, or empty.
  std::size_t skipped = 0;
};

/// Aligns each landmark frame to its nearest IMU sample (within half the
/// local sample spacing). Frames aligned to the first IMU sample are skipped
/// because no propagated sigma set exists yet.
FrameSchedule schedule_frames(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames);

/**
 * Streams the IMU samples through the particle filter. At sample k > 0 the
 * ensemble is propagated with sample k-1 over t_k - t_{k-1}; a landmark frame
 * due at k triggers update_step and resample_if_needed. An estimate is emitted
 * for every sample. Deterministic for a given config.seed at any thread count.
 */
FilterRun run_qupf(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames,
                   const FilterConfig& config, const RunOptions& options = {});

FilterRun run_ekf(std::span<const ImuSample> imu, std::span<const LandmarkFrame> frames,
                  const FilterConfig& config);

/// IMU integration from config.init_mean with its biases, no corrections.
FilterRun run_dead_reckoning(std::span<const ImuSample> imu, const FilterConfig& config);

FilterRun run_filter(FilterKind kind, std::span<const ImuSample> imu,
                     std::span<const LandmarkFrame> frames, const FilterConfig& config,
                     const RunOptions& options = {});

}  // namespace quatnav
