#include "quatnav/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "quatnav/errors.hpp"
#include "quatnav/parallel.hpp"

namespace quatnav::cli {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IngestError(dir.string(), 0, 0, "cannot create output directory");
  }
}

std::string fixed(double x, int digits = 6) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << x;
  return ss.str();
}

nlohmann::json optional_number(const std::optional<double>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

}  // namespace

Dataset simulate_dataset(const SimulationSettings& settings, std::uint64_t seed) {
  const Trajectory traj = generate_trajectory(settings.trajectory);
  const SensorStreams streams =
      synthesize_sensors(traj, settings.sensors, settings.trajectory, seed);
  Dataset data;
  data.imu = streams.imu;
  data.landmarks = streams.frames;
  std::vector<TimedState> truth = traj.truth;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    truth[k].state.bias_gyro = streams.bias[k].gyro;
    truth[k].state.bias_accel = streams.bias[k].accel;
  }
  data.truth = std::move(truth);
  return data;
}

std::string SimulateResult::text() const {
  std::ostringstream ss;
  ss << "dataset: " << dir.string() << "\n"
     << "  imu samples:     " << imu_rows << "\n"
     << "  landmark frames: " << frames << "\n"
     << "  landmarks:       " << landmarks << "\n";
  return ss.str();
}

SimulateResult cmd_simulate(const fs::path& spec, const fs::path& out, std::uint64_t seed) {
  const SimulationSettings settings = load_simulation_settings(spec);
  const Dataset data = simulate_dataset(settings, seed);
  ensure_dir(out);
  write_dataset(data, out);
  SimulateResult r;
  r.dir = out;
  r.imu_rows = data.imu.size();
  r.frames = data.landmarks.size();
  for (const auto& f : data.landmarks) {
    r.landmarks += f.landmarks.size();
  }
  return r;
}

std::string RunReport::text() const {
  std::ostringstream ss;
  ss << "== " << label << " (" << to_string(filter) << ") ==\n";
  ss << "config: " << config_path << "\n";
  std::istringstream echo(config_echo);
  for (std::string line; std::getline(echo, line);) {
    ss << "  " << line << "\n";
  }
  ss << "estimates: " << estimates << "  updates: " << updates << "  resamples: " << resamples
     << "  skipped frames: " << skipped_frames << "\n";
  ss << "wall time: " << fixed(wall_time, 3) << " s\n";
  if (summary) {
    const ErrorSummary& s = *summary;
    ss << "errors over t >= " << fixed(s.window_start, 3) << " s (" << s.count << " samples)\n"
       << "  RMSE  r " << fixed(s.rmse_r) << " rad   p " << fixed(s.rmse_p) << " m   v "
       << fixed(s.rmse_v) << " m/s\n"
       << "  final r " << fixed(s.final_r) << " rad   p " << fixed(s.final_p) << " m   v "
       << fixed(s.final_v) << " m/s\n"
       << "  convergence (|p_e| < " << fixed(s.convergence_threshold, 3) << " m): "
       << (s.convergence_time ? fixed(*s.convergence_time, 3) + " s" : std::string("never"))
       << "\n";
  } else {
    ss << "no ground truth: errors not computed\n";
  }
  for (const fs::path& p : outputs) {
    ss << "wrote " << p.string() << "\n";
  }
  return ss.str();
}

nlohmann::json RunReport::json() const {
  nlohmann::json j;
  j["label"] = label;
  j["filter"] = to_string(filter);
  j["config"] = config_path;
  j["config_echo"] = config_echo;
  j["estimates"] = estimates;
  j["updates"] = updates;
  j["resamples"] = resamples;
  j["skipped_frames"] = skipped_frames;
  j["wall_time_s"] = wall_time;
  if (summary) {
    const ErrorSummary& s = *summary;
    j["summary"] = {{"window_start", s.window_start},
                    {"samples", s.count},
                    {"rmse_r", s.rmse_r},
                    {"rmse_p", s.rmse_p},
                    {"rmse_v", s.rmse_v},
                    {"final_r", s.final_r},
                    {"final_p", s.final_p},
                    {"final_v", s.final_v},
                    {"convergence_threshold", s.convergence_threshold},
                    {"convergence_time", optional_number(s.convergence_time)}};
  } else {
    j["summary"] = nullptr;
  }
  std::vector<std::string> files;
  for (const fs::path& p : outputs) {
    files.push_back(p.string());
  }
  j["outputs"] = files;
  return j;
}

RunReport execute_run(const Dataset& data, FilterKind kind, const FilterSettings& settings,
                      const fs::path& out, int threads, const std::string& label) {
  if (data.imu.empty()) {
    throw PreconditionError("dataset has no IMU samples");
  }
  const std::vector<TimedState> no_truth;
  const FilterConfig config = resolve_initial_state(
      settings, data.imu.front().t, data.truth ? std::span<const TimedState>(*data.truth)
                                               : std::span<const TimedState>(no_truth));
  RunOptions options;
  options.threads = threads < 0 ? threads_from_environment() : threads;

  const auto start = std::chrono::steady_clock::now();
  const FilterRun run = run_filter(kind, data.imu, data.landmarks, config, options);
  const auto stop = std::chrono::steady_clock::now();

  RunReport report;
  report.label = label;
  report.filter = kind;
  report.config_path = settings.source;
  report.config_echo = settings.echo;
  report.wall_time = std::chrono::duration<double>(stop - start).count();
  report.estimates = run.estimates.size();
  report.updates = run.updates;
  report.resamples = run.resamples;
  report.skipped_frames = run.skipped_frames;

  ensure_dir(out);
  const std::vector<TimedState> estimates = to_timed_states(run.estimates);
  write_states_csv(out / "estimates.csv", estimates);
  report.outputs.push_back(out / "estimates.csv");
  if (data.truth && !data.truth->empty()) {
    const std::vector<TimedState>& truth = *data.truth;
    double spacing = 0.0;
    if (truth.size() > 1) {
      spacing = (truth.back().t - truth.front().t) / static_cast<double>(truth.size() - 1);
    }
    const AlignedStates aligned = align_to_truth(truth, estimates, std::max(0.5 * spacing, 1e-9));
    report.errors = compute_errors(aligned.truth, aligned.estimates);
    write_errors_csv(out / "errors.csv", report.errors);
    report.outputs.push_back(out / "errors.csv");
    // summarize what was written so the report can be re-derived from the file
    const std::vector<ErrorRecord> written = read_errors_csv(out / "errors.csv");
    report.summary = summarize_errors(written, settings.evaluation.convergence_threshold,
                                      settings.evaluation.window_start);
  }
  report.outputs.push_back(out / "summary.json");
  std::ofstream js(out / "summary.json", std::ios::binary | std::ios::trunc);
  js << report.json().dump(2) << '\n';
  js.flush();
  if (!js) {
    throw IngestError((out / "summary.json").string(), 0, 0, "write failed");
  }
  return report;
}

RunReport cmd_run(const RunRequest& request) {
  FilterSettings settings = load_filter_settings(request.config);
  FilterKind kind;
  if (request.filter) {
    kind = *request.filter;
  } else if (settings.kind) {
    kind = *settings.kind;
  } else {
    throw ConfigError(request.config.string() + ": no filter given (--filter or filter.kind)");
  }
  const Dataset data = load_dataset(request.data, request.format);
  RunReport r = execute_run(data, kind, settings, request.out, request.threads,
                            request.config.stem().string());
  return r;
}

std::string CompareReport::text() const {
  std::ostringstream ss;
  for (const RunReport& r : runs) {
    ss << r.text() << "\n";
  }
  ss << "ranking by position RMSE:\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const RunReport& r = runs[ranking[i]];
    ss << "  " << i + 1 << ". " << r.label << "  r " << fixed(r.summary->rmse_r) << "  p "
       << fixed(r.summary->rmse_p) << "  v " << fixed(r.summary->rmse_v) << "\n";
  }
  ss << "wrote " << table.string() << "\nwrote " << ranking_file.string() << "\n";
  return ss.str();
}

CompareReport cmd_compare(const CompareRequest& request) {
  if (request.configs.size() < 2) {
    throw ConfigError("compare needs at least two configs");
  }
  std::vector<FilterSettings> settings;
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const fs::path& file : request.configs) {
    FilterSettings s = load_filter_settings(file);
    if (!s.kind) {
      throw ConfigError(file.string() + ": filter.kind is required for compare");
    }
    std::string label = file.stem().string();
    // a config compared with itself gets a numbered label
    for (int n = 2; seen.count(label) != 0; ++n) {
      label = file.stem().string() + "_" + std::to_string(n);
    }
    seen.insert(label);
    labels.push_back(label);
    settings.push_back(std::move(s));
  }
  const Dataset data = load_dataset(request.data, request.format);
  if (!data.truth) {
    throw PreconditionError("compare needs a dataset with ground truth");
  }
  ensure_dir(request.out);

  CompareReport report;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    RunReport r = execute_run(data, *settings[i].kind, settings[i], request.out / labels[i],
                              request.threads, labels[i]);
    report.runs.push_back(std::move(r));
  }
  const std::size_t rows = report.runs.front().errors.size();
  for (const RunReport& r : report.runs) {
    if (r.errors.size() != rows) {
      throw PreconditionError("runs produced different numbers of error records");
    }
  }

  report.table = request.out / "comparison.csv";
  std::ofstream table(report.table, std::ios::binary | std::ios::trunc);
  table << "t";
  for (const std::string& l : labels) {
    table << ',' << l << "_re_norm," << l << "_pe_norm," << l << "_ve_norm";
  }
  table << '\n';
  for (std::size_t k = 0; k < rows; ++k) {
    table << format_double(report.runs.front().errors[k].t);
    for (const RunReport& r : report.runs) {
      const ErrorRecord& e = r.errors[k];
      table << ',' << format_double(e.r_norm) << ',' << format_double(e.p_norm) << ','
            << format_double(e.v_norm);
    }
    table << '\n';
  }
  table.flush();
  if (!table) {
    throw IngestError(report.table.string(), 0, 0, "write failed");
  }

  report.ranking.resize(report.runs.size());
  std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
  std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
    // an empty window (NaN) ranks last
    const double pa = report.runs[a].summary->rmse_p;
    const double pb = report.runs[b].summary->rmse_p;
    return !std::isnan(pa) && (std::isnan(pb) || pa < pb);
  });
  report.ranking_file = request.out / "ranking.csv";
  std::ofstream rank(report.ranking_file, std::ios::binary | std::ios::trunc);
  rank << "rank,label,filter,rmse_r,rmse_p,rmse_v,final_r,final_p,final_v\n";
  for (std::size_t i = 0; i < report.ranking.size(); ++i) {
    const RunReport& r = report.runs[report.ranking[i]];
    const ErrorSummary& s = *r.summary;
    rank << i + 1 << ',' << r.label << ',' << to_string(r.filter) << ',' << format_double(s.rmse_r)
         << ',' << format_double(s.rmse_p) << ',' << format_double(s.rmse_v) << ','
         << format_double(s.final_r) << ',' << format_double(s.final_p) << ','
         << format_double(s.final_v) << '\n';
  }
  rank.flush();
  if (!rank) {
    throw IngestError(report.ranking_file.string(), 0, 0, "write failed");
  }
  return report;
}

}  // namespace quatnav::cli
