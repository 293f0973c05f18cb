#include "quatnav/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <system_error>

#include "quatnav/errors.hpp"

namespace quatnav {

namespace fs = std::filesystem;

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "native-csv") {
    return DatasetFormat::NativeCsv;
  }
  if (name == "asl-csv") {
    return DatasetFormat::AslCsv;
  }
  throw ConfigError("unknown dataset format '" + std::string(name) +
                    "' (expected native-csv or asl-csv)");
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double asl_ns_to_seconds(std::int64_t ns) {
  // Go through the decimal string so the result is the double nearest to the
  // exact value rather than ns * 1e-9 with two roundings.
  const bool negative = ns < 0;
  const auto mag = negative ? -static_cast<unsigned long long>(ns) : static_cast<unsigned long long>(ns);
  std::string frac = std::to_string(mag % 1000000000ULL);
  frac.insert(0, 9 - frac.size(), '0');
  const std::string text = (negative ? "-" : "") + std::to_string(mag / 1000000000ULL) + "." + frac;
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IngestError(file.string(), 0, 0, "cannot open for writing");
  }
  return out;
}

void finish(std::ofstream& out, const fs::path& file) {
  out.flush();
  if (!out) {
    throw IngestError(file.string(), 0, 0, "write failed");
  }
}

template <typename Row>
void put_row(std::ofstream& out, const Row& values) {
  bool first = true;
  for (const std::string& v : values) {
    if (!first) {
      out << ',';
    }
    out << v;
    first = false;
  }
  out << '\n';
}

// Line-oriented CSV reader that tracks positions for diagnostics.
class CsvReader {
 public:
  CsvReader(const fs::path& file, bool skip_comments)
      : file_(file.string()), in_(file, std::ios::binary), skip_comments_(skip_comments) {
    if (!in_) {
      throw IngestError(file_, 0, 0, "cannot open");
    }
  }

  // Next non-empty line split on commas; false at end of file.
  bool next() {
    std::string text;
    while (std::getline(in_, text)) {
      ++line_;
      if (!text.empty() && text.back() == '\r') {
        text.pop_back();
      }
      if (text.empty() || (skip_comments_ && text.front() == '#')) {
        continue;
      }
      text_ = std::move(text);
      fields_.clear();
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = text_.find(',', start);
        fields_.push_back(std::string_view(text_).substr(start, comma - start));
        if (comma == std::string::npos) {
          break;
        }
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  void expect_header(std::string_view header) {
    if (!next() || text_ != header) {
      throw IngestError(file_, line_, 1, "expected header '" + std::string(header) + "'");
    }
  }

  void expect_fields(std::size_t n) const {
    if (fields_.size() != n) {
      const std::size_t column = std::min(fields_.size(), n) + 1;
      throw IngestError(file_, line_, column,
                        "expected " + std::to_string(n) + " fields, found " +
                            std::to_string(fields_.size()));
    }
  }

  double real(std::size_t i) const {
    const std::string_view f = fields_[i];
    double out = 0.0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), out);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(out)) {
      fail(i, "malformed number '" + std::string(f) + "'");
    }
    return out;
  }

  std::int64_t integer(std::size_t i) const {
    const std::string_view f = fields_[i];
    std::int64_t out = 0;
    const auto res = std::from_chars(f.data(), f.data() + f.size(), out);
    if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
      fail(i, "malformed integer '" + std::string(f) + "'");
    }
    return out;
  }

  Vec3 vec3(std::size_t i) const { return {real(i), real(i + 1), real(i + 2)}; }

  Quaternion quat(std::size_t i) const {
    try {
      return Quaternion(real(i), real(i + 1), real(i + 2), real(i + 3));
    } catch (const PreconditionError&) {
      fail(i, "degenerate quaternion");
    }
  }

  [[noreturn]] void fail(std::size_t field, const std::string& what) const {
    throw IngestError(file_, line_, field + 1, what);
  }

  [[noreturn]] void out_of_order(double t, double previous) const {
    throw OrderingError(file_, line_, 1,
                        "timestamp " + format_double(t) + " does not follow " +
                            format_double(previous));
  }

  int line() const { return line_; }

 private:
  std::string file_;
  std::ifstream in_;
  bool skip_comments_;
  int line_ = 0;
  std::string text_;
  std::vector<std::string_view> fields_;
};

}  // namespace

void write_imu_csv(const fs::path& file, std::span<const ImuSample> imu) {
  std::ofstream out = open_out(file);
  out << kImuHeader << '\n';
  for (const ImuSample& s : imu) {
    put_row(out, std::array{format_double(s.t), format_double(s.gyro.x()), format_double(s.gyro.y()),
                            format_double(s.gyro.z()), format_double(s.accel.x()),
                            format_double(s.accel.y()), format_double(s.accel.z())});
  }
  finish(out, file);
}

void write_landmarks_csv(const fs::path& file, std::span<const LandmarkFrame> frames) {
  std::ofstream out = open_out(file);
  out << kLandmarkHeader << '\n';
  for (const LandmarkFrame& f : frames) {
    for (const Landmark& l : f.landmarks) {
      put_row(out, std::array{format_double(f.t), std::to_string(l.id), format_double(l.world.x()),
                              format_double(l.world.y()), format_double(l.world.z()),
                              format_double(l.body.x()), format_double(l.body.y()),
                              format_double(l.body.z())});
    }
  }
  finish(out, file);
}

void write_states_csv(const fs::path& file, std::span<const TimedState> states) {
  std::ofstream out = open_out(file);
  out << kStateHeader << '\n';
  for (const TimedState& s : states) {
    const Vec4& q = s.state.q.coeffs();
    put_row(out, std::array{format_double(s.t), format_double(q[0]), format_double(q[1]),
                            format_double(q[2]), format_double(q[3]), format_double(s.state.p.x()),
                            format_double(s.state.p.y()), format_double(s.state.p.z()),
                            format_double(s.state.v.x()), format_double(s.state.v.y()),
                            format_double(s.state.v.z())});
  }
  finish(out, file);
}

std::vector<ImuSample> read_imu_csv(const fs::path& file) {
  CsvReader csv(file, false);
  csv.expect_header(kImuHeader);
  std::vector<ImuSample> out;
  while (csv.next()) {
    csv.expect_fields(7);
    ImuSample s;
    s.t = csv.real(0);
    if (!out.empty() && !(s.t > out.back().t)) {
      csv.out_of_order(s.t, out.back().t);
    }
    s.gyro = csv.vec3(1);
    s.accel = csv.vec3(4);
    out.push_back(s);
  }
  return out;
}

std::vector<LandmarkFrame> read_landmarks_csv(const fs::path& file) {
  CsvReader csv(file, false);
  csv.expect_header(kLandmarkHeader);
  std::vector<LandmarkFrame> out;
  std::set<long> ids;
  while (csv.next()) {
    csv.expect_fields(8);
    const double t = csv.real(0);
    if (out.empty() || t != out.back().t) {
      if (!out.empty() && t < out.back().t) {
        csv.out_of_order(t, out.back().t);
      }
      out.push_back(LandmarkFrame{t, {}});
      ids.clear();
    }
    Landmark l;
    l.id = static_cast<long>(csv.integer(1));
    if (!ids.insert(l.id).second) {
      csv.fail(1, "duplicate landmark id " + std::to_string(l.id) + " within one frame");
    }
    l.world = csv.vec3(2);
    l.body = csv.vec3(5);
    out.back().landmarks.push_back(l);
  }
  return out;
}

std::vector<TimedState> read_states_csv(const fs::path& file) {
  CsvReader csv(file, false);
  csv.expect_header(kStateHeader);
  std::vector<TimedState> out;
  while (csv.next()) {
    csv.expect_fields(11);
    TimedState s;
    s.t = csv.real(0);
    if (!out.empty() && !(s.t > out.back().t)) {
      csv.out_of_order(s.t, out.back().t);
    }
    s.state.q = csv.quat(1);
    s.state.p = csv.vec3(5);
    s.state.v = csv.vec3(8);
    out.push_back(s);
  }
  return out;
}

std::vector<ImuSample> read_asl_imu(const fs::path& file) {
  CsvReader csv(file, true);
  std::vector<ImuSample> out;
  while (csv.next()) {
    csv.expect_fields(7);
    ImuSample s;
    s.t = asl_ns_to_seconds(csv.integer(0));
    if (!out.empty() && !(s.t > out.back().t)) {
      csv.out_of_order(s.t, out.back().t);
    }
    s.gyro = csv.vec3(1);
    s.accel = csv.vec3(4);
    out.push_back(s);
  }
  return out;
}

std::vector<TimedState> read_asl_groundtruth(const fs::path& file) {
  CsvReader csv(file, true);
  std::vector<TimedState> out;
  while (csv.next()) {
    csv.expect_fields(17);
    TimedState s;
    s.t = asl_ns_to_seconds(csv.integer(0));
    if (!out.empty() && !(s.t > out.back().t)) {
      csv.out_of_order(s.t, out.back().t);
    }
    s.state.p = csv.vec3(1);
    s.state.q = csv.quat(4);
    s.state.v = csv.vec3(8);
    s.state.bias_gyro = csv.vec3(11);
    s.state.bias_accel = csv.vec3(14);
    out.push_back(s);
  }
  return out;
}

void write_dataset(const Dataset& data, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IngestError(dir.string(), 0, 0, "cannot create directory: " + ec.message());
  }
  write_imu_csv(dir / "imu.csv", data.imu);
  write_landmarks_csv(dir / "landmarks.csv", data.landmarks);
  if (data.truth) {
    write_states_csv(dir / "groundtruth.csv", *data.truth);
  }
}

namespace {

fs::path first_existing(const fs::path& dir, std::initializer_list<const char*> candidates) {
  for (const char* c : candidates) {
    if (fs::exists(dir / c)) {
      return dir / c;
    }
  }
  return {};
}

}  // namespace

Dataset load_dataset(const fs::path& dir, DatasetFormat format) {
  if (!fs::is_directory(dir)) {
    throw IngestError(dir.string(), 0, 0, "dataset directory not found");
  }
  Dataset data;
  if (format == DatasetFormat::NativeCsv) {
    data.imu = read_imu_csv(dir / "imu.csv");
    data.landmarks = read_landmarks_csv(dir / "landmarks.csv");
    if (fs::exists(dir / "groundtruth.csv")) {
      data.truth = read_states_csv(dir / "groundtruth.csv");
    }
    return data;
  }
  const fs::path imu = first_existing(dir, {"mav0/imu0/data.csv", "imu0/data.csv"});
  if (imu.empty()) {
    throw IngestError(dir.string(), 0, 0, "no imu0/data.csv found");
  }
  data.imu = read_asl_imu(imu);
  const fs::path landmarks = first_existing(dir, {"landmarks.csv", "mav0/landmarks.csv"});
  if (landmarks.empty()) {
    throw IngestError(dir.string(), 0, 0,
                      "landmarks.csv with pre-triangulated world points is required");
  }
  data.landmarks = read_landmarks_csv(landmarks);
  const fs::path gt = first_existing(
      dir, {"mav0/state_groundtruth_estimate0/data.csv", "state_groundtruth_estimate0/data.csv"});
  if (!gt.empty()) {
    data.truth = read_asl_groundtruth(gt);
  }
  return data;
}

}  // namespace quatnav
