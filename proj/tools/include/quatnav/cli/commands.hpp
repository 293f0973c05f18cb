#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "quatnav/cli/settings.hpp"
#include "quatnav/dataset.hpp"
#include "quatnav/metrics.hpp"

namespace quatnav::cli {

namespace fs = std::filesystem;

/// Synthesized dataset with truth biases filled in.
Dataset simulate_dataset(const SimulationSettings& settings, std::uint64_t seed);

struct SimulateResult {
  fs::path dir;
  std::size_t imu_rows = 0;
  std::size_t frames = 0;
  std::size_t landmarks = 0;
  std::string text() const;
};

SimulateResult cmd_simulate(const fs::path& spec, const fs::path& out, std::uint64_t seed);

struct RunReport {
  std::string label;
  FilterKind filter = FilterKind::Qupf;
  std::string config_path;
  std::string config_echo;
  std::optional<ErrorSummary> summary;
  std::vector<ErrorRecord> errors;
  double wall_time = 0.0;
  std::size_t estimates = 0;
  std::size_t updates = 0;
  std::size_t resamples = 0;
  std::size_t skipped_frames = 0;
  std::vector<fs::path> outputs;

  std::string text() const;
  nlohmann::json json() const;
};

struct RunRequest {
  fs::path data;
  DatasetFormat format = DatasetFormat::NativeCsv;
  /// Overrides filter.kind from the config when set.
  std::optional<FilterKind> filter;
  fs::path config;
  fs::path out;
  /// Particle-layer workers; negative reads QUATNAV_THREADS.
  int threads = -1;
};

/// Runs one filter on a loaded dataset and writes estimates.csv, errors.csv
/// (with truth) and summary.json into `out`.
RunReport execute_run(const Dataset& data, FilterKind kind, const FilterSettings& settings,
                      const fs::path& out, int threads, const std::string& label);

RunReport cmd_run(const RunRequest& request);

struct CompareRequest {
  fs::path data;
  DatasetFormat format = DatasetFormat::NativeCsv;
  std::vector<fs::path> configs;
  fs::path out;
  int threads = -1;
};

struct CompareReport {
  std::vector<RunReport> runs;
  /// Indices into runs ordered by position RMSE, best first.
  std::vector<std::size_t> ranking;
  fs::path table;
  fs::path ranking_file;

  std::string text() const;
};

/// Each config must name its filter. Writes comparison.csv (per-step error
/// norms side by side), ranking.csv and one sub-directory per config.
CompareReport cmd_compare(const CompareRequest& request);

}  // namespace quatnav::cli
