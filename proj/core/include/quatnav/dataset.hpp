#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quatnav/kinematics.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {

struct Dataset {
  std::vector<ImuSample> imu;
  std::vector<LandmarkFrame> landmarks;
  std::optional<std::vector<TimedState>> truth;
};

enum class DatasetFormat { NativeCsv, AslCsv };

/// "native-csv" or "asl-csv".
DatasetFormat parse_dataset_format(std::string_view name);

inline constexpr std::string_view kImuHeader = "t,wx,wy,wz,ax,ay,az";
inline constexpr std::string_view kLandmarkHeader = "t,id,fwx,fwy,fwz,fbx,fby,fbz";
/// Quaternions are stored [w, x, y, z], the same order as ASL ground truth.
inline constexpr std::string_view kStateHeader = "t,qw,qx,qy,qz,px,py,pz,vx,vy,vz";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Exact decimal conversion: 1403636579758555392 -> 1403636579.758555392 (correctly rounded).
double asl_ns_to_seconds(std::int64_t ns);

void write_imu_csv(const std::filesystem::path& file, std::span<const ImuSample> imu);
void write_landmarks_csv(const std::filesystem::path& file, std::span<const LandmarkFrame> frames);
/// groundtruth.csv / estimates.csv layout.
void write_states_csv(const std::filesystem::path& file, std::span<const TimedState> states);

std::vector<ImuSample> read_imu_csv(const std::filesystem::path& file);
std::vector<LandmarkFrame> read_landmarks_csv(const std::filesystem::path& file);
std::vector<TimedState> read_states_csv(const std::filesystem::path& file);

/// EuRoC-style imu0/data.csv: ns, w_xyz, a_xyz.
std::vector<ImuSample> read_asl_imu(const std::filesystem::path& file);
/// EuRoC-style state_groundtruth_estimate0/data.csv: ns, p, q(wxyz), v, b_w, b_a.
std::vector<TimedState> read_asl_groundtruth(const std::filesystem::path& file);

/// Writes imu.csv, landmarks.csv and (if present) groundtruth.csv into `dir`.
void write_dataset(const Dataset& data, const std::filesystem::path& dir);

/**
 * native-csv: imu.csv, landmarks.csv, optional groundtruth.csv in `dir`.
 * asl-csv: [mav0/]imu0/data.csv, optional [mav0/]state_groundtruth_estimate0/data.csv,
 * plus a native landmarks.csv with pre-triangulated world points.
 */
Dataset load_dataset(const std::filesystem::path& dir, DatasetFormat format);

}  // namespace quatnav
