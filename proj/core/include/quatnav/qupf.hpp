#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quatnav/parallel.hpp"
#include "quatnav/qukf.hpp"
#include "quatnav/sensing.hpp"

namespace quatnav {

/// Where the per-particle proposal is centred after a landmark update.
enum class ProposalMode {
  /// Posterior mean x_{k|k}, the density the importance ratio divides by.
  StandardUpf,
  /// Predicted mean x_{k|k-1}, as literally described for the draw.
  Literal,
};

struct FilterConfig {
  int particles = 50;
  /// Resample when the effective sample size falls below this value.
  double resample_threshold = 25.0;
  double epsilon = 1e-12;
  UkfTuning tuning;
  ImuNoiseParams imu_noise;
  LandmarkNoise landmark_noise;
  WorldParams world;
  NavState init_mean;
  ErrorCov init_cov = ErrorCov::Identity() * 1e-2;
  ProposalMode proposal = ProposalMode::StandardUpf;
  std::uint64_t seed = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct Particle {
  /// UKF moments: x_{k|k} after an update, x_{k|k-1} after a prediction.
  UkfMoments ukf;
  /// Predicted moments of the latest time update.
  UkfMoments prior;
  /// The particle itself.
  NavState sample;
  double weight = 0.0;
  PropagatedPoints propagated;
  bool has_prediction = false;
};

struct Ensemble {
  std::vector<Particle> particles;
  /// Number of predictions applied so far; keys the random substreams.
  std::uint64_t step = 0;
};

struct Estimate {
  double t = 0.0;
  NavState state;
  double ess = 0.0;
  bool resampled = false;
};

struct ResampleOutcome {
  bool resampled = false;
  double ess = 0.0;
};

/// Draws m_p particles around the initial mean, uniform weights, and sets
/// each particle's UKF to (its sample, P_0).
Ensemble initialize(const FilterConfig& config);

/// Augment, sigma points and time update for every particle with sample time
/// `dt`. Each particle's sample is set to its predicted mean.
void predict_step(Ensemble& ensemble, const ImuSample& u, double dt, const FilterConfig& config,
                  const WorkerPool& pool);

/// Measurement update, proposal draw and importance weighting for every
/// particle, followed by weight normalization. Requires a non-empty frame and
/// a preceding predict_step.
void update_step(Ensemble& ensemble, const LandmarkFrame& frame, const FilterConfig& config,
                 const WorkerPool& pool);

double effective_sample_size(std::span<const double> weights);

/// Low-variance resampling: indices of the particles selected by the comb
/// (u0 + i) / n, u0 in [0, 1).
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u0);

ResampleOutcome resample_if_needed(Ensemble& ensemble, const FilterConfig& config);

/// Weighted average of the particles (quaternion mean for attitude). Also
/// resets every UKF mean to its particle for the next iteration.
NavState estimate(Ensemble& ensemble);

}  // namespace quatnav
