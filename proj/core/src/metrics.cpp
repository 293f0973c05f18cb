#include "quatnav/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <iterator>
#include <string_view>
#include <system_error>
#include <string>

#include "quatnav/dataset.hpp"
#include "quatnav/errors.hpp"

namespace quatnav {

std::vector<ErrorRecord> compute_errors(std::span<const TimedState> truth,
                                        std::span<const TimedState> estimates) {
  if (truth.size() != estimates.size()) {
    throw PreconditionError("compute_errors: " + std::to_string(truth.size()) + " truth vs " +
                            std::to_string(estimates.size()) + " estimates");
  }
  std::vector<ErrorRecord> out;
  out.reserve(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (std::abs(truth[k].t - estimates[k].t) > 1e-9) {
      throw PreconditionError("compute_errors: timestamp mismatch at record " + std::to_string(k));
    }
    const NavState& x = truth[k].state;
    const NavState& xh = estimates[k].state;
    ErrorRecord e;
    e.t = truth[k].t;
    e.r_e = boxminus(x.q, xh.q);
    e.p_e = x.p - xh.p;
    e.v_e = x.v - xh.v;
    e.r_norm = e.r_e.norm();
    e.p_norm = e.p_e.norm();
    e.v_norm = e.v_e.norm();
    out.push_back(e);
  }
  return out;
}

ErrorSummary summarize_errors(std::span<const ErrorRecord> errors, double convergence_threshold,
                              double window_start) {
  ErrorSummary s;
  s.window_start = window_start;
  s.convergence_threshold = convergence_threshold;
  double sr = 0.0;
  double sp = 0.0;
  double sv = 0.0;
  for (const ErrorRecord& e : errors) {
    if (e.t < window_start) {
      continue;
    }
    ++s.count;
    sr += e.r_norm * e.r_norm;
    sp += e.p_norm * e.p_norm;
    sv += e.v_norm * e.v_norm;
  }
  if (s.count == 0) {
    s.rmse_r = s.rmse_p = s.rmse_v = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto n = static_cast<double>(s.count);
    s.rmse_r = std::sqrt(sr / n);
    s.rmse_p = std::sqrt(sp / n);
    s.rmse_v = std::sqrt(sv / n);
  }
  if (!errors.empty()) {
    s.final_r = errors.back().r_norm;
    s.final_p = errors.back().p_norm;
    s.final_v = errors.back().v_norm;
    // walk back to the last violation
    std::size_t k = errors.size();
    while (k > 0 && errors[k - 1].p_norm < convergence_threshold) {
      --k;
    }
    if (k < errors.size()) {
      s.convergence_time = errors[k].t;
    }
  }
  return s;
}

std::vector<TimedState> to_timed_states(std::span<const Estimate> estimates) {
  std::vector<TimedState> out;
  out.reserve(estimates.size());
  for (const Estimate& e : estimates) {
    out.push_back({e.t, e.state});
  }
  return out;
}

AlignedStates align_to_truth(std::span<const TimedState> truth,
                             std::span<const TimedState> estimates, double tolerance) {
  AlignedStates out;
  if (truth.empty()) {
    return out;
  }
  const double lo = truth.front().t - tolerance;
  const double hi = truth.back().t + tolerance;
  for (const TimedState& e : estimates) {
    if (e.t < lo || e.t > hi) {
      continue;
    }
    auto it = std::lower_bound(truth.begin(), truth.end(), e.t,
                               [](const TimedState& s, double t) { return s.t < t; });
    if (it == truth.end() || (it != truth.begin() && e.t - std::prev(it)->t <= it->t - e.t)) {
      it = std::prev(it);
    }
    if (std::abs(it->t - e.t) > tolerance) {
      throw PreconditionError("no ground truth within " + format_double(tolerance) +
                              " s of estimate at t = " + format_double(e.t));
    }
    out.truth.push_back({e.t, it->state});
    out.estimates.push_back(e);
  }
  return out;
}

void write_errors_csv(const std::filesystem::path& file, std::span<const ErrorRecord> errors) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IngestError(file.string(), 0, 0, "cannot open for writing");
  }
  out << kErrorHeader << '\n';
  for (const ErrorRecord& e : errors) {
    out << format_double(e.t);
    for (const Vec3* v : {&e.r_e, &e.p_e, &e.v_e}) {
      for (int i = 0; i < 3; ++i) {
        out << ',' << format_double((*v)[i]);
      }
    }
    out << ',' << format_double(e.r_norm) << ',' << format_double(e.p_norm) << ','
        << format_double(e.v_norm) << '\n';
  }
  out.flush();
  if (!out) {
    throw IngestError(file.string(), 0, 0, "write failed");
  }
}

std::vector<ErrorRecord> read_errors_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw IngestError(file.string(), 0, 0, "cannot open");
  }
  std::string line;
  std::getline(in, line);
  if (line != kErrorHeader) {
    throw IngestError(file.string(), 1, 1, "unexpected header");
  }
  std::vector<ErrorRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) {
      continue;
    }
    std::array<double, 13> v{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::size_t comma = line.find(',', start);
      const std::string_view f = std::string_view(line).substr(start, comma - start);
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() ||
          (comma == std::string::npos) != (i + 1 == v.size())) {
        throw IngestError(file.string(), row, i + 1, "malformed field");
      }
      start = comma + 1;
    }
    ErrorRecord e;
    e.t = v[0];
    e.r_e = {v[1], v[2], v[3]};
    e.p_e = {v[4], v[5], v[6]};
    e.v_e = {v[7], v[8], v[9]};
    e.r_norm = v[10];
    e.p_norm = v[11];
    e.v_norm = v[12];
    out.push_back(e);
  }
  return out;
}

}  // namespace quatnav
