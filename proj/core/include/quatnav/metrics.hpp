#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "quatnav/kinematics.hpp"
#include "quatnav/qupf.hpp"

namespace quatnav {

struct ErrorRecord {
  double t = 0.0;
  Vec3 r_e = Vec3::Zero();  ///< q (-) q_hat, rad
  Vec3 p_e = Vec3::Zero();  ///< p - p_hat, m
  Vec3 v_e = Vec3::Zero();  ///< v - v_hat, m/s
  double r_norm = 0.0;
  double p_norm = 0.0;
  double v_norm = 0.0;
};

struct ErrorSummary {
  std::size_t count = 0;
  double window_start = 0.0;
  double rmse_r = 0.0;
  double rmse_p = 0.0;
  double rmse_v = 0.0;
  double final_r = 0.0;
  double final_p = 0.0;
  double final_v = 0.0;
  double convergence_threshold = 0.0;
  /// First t after which the position error stays below the threshold.
  std::optional<double> convergence_time;
};

/// Timestamps must agree pairwise to 1e-9 s; throws PreconditionError otherwise.
std::vector<ErrorRecord> compute_errors(std::span<const TimedState> truth,
                                        std::span<const TimedState> estimates);

/// RMSE of the error norms over records with t >= window_start; final errors
/// are those of the last record.
ErrorSummary summarize_errors(std::span<const ErrorRecord> errors, double convergence_threshold,
                              double window_start = -std::numeric_limits<double>::infinity());

std::vector<TimedState> to_timed_states(std::span<const Estimate> estimates);

struct AlignedStates {
  std::vector<TimedState> truth;
  std::vector<TimedState> estimates;
};

/// Pairs each estimate with the truth sample nearest in time. Estimates
/// outside the truth span are dropped; an in-span estimate without truth
/// within `tolerance` seconds throws PreconditionError.
AlignedStates align_to_truth(std::span<const TimedState> truth,
                             std::span<const TimedState> estimates, double tolerance);

inline constexpr std::string_view kErrorHeader =
    "t,re1,re2,re3,pe1,pe2,pe3,ve1,ve2,ve3,re_norm,pe_norm,ve_norm";

void write_errors_csv(const std::filesystem::path& file, std::span<const ErrorRecord> errors);
std::vector<ErrorRecord> read_errors_csv(const std::filesystem::path& file);

}  // namespace quatnav
