#include "quatnav/qupf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "quatnav/errors.hpp"
#include "quatnav/linalg.hpp"
#include "quatnav/random.hpp"

namespace quatnav {

namespace {

constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kProposalTag = 2;
constexpr std::uint64_t kResampleTag = 3;

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) {
    return b;
  }
  if (b == -std::numeric_limits<double>::infinity()) {
    return a;
  }
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Re-throws numerical failures with the particle index attached.
template <typename Fn>
void for_each_particle(const WorkerPool& pool, std::size_t n, Fn&& fn) {
  pool.for_each(n, [&fn](std::size_t i) {
    try {
      fn(i);
    } catch (const NumericalError& e) {
      throw NumericalError("particle " + std::to_string(i) + ": " + e.what(), e.pivot(),
                           static_cast<int>(i));
    } catch (const AmbiguityError& e) {
      throw AmbiguityError("particle " + std::to_string(i) + ": " + e.what(), e.eigen_gap());
    }
  });
}

}  // namespace

void FilterConfig::validate() const {
  if (particles < 1) {
    throw ConfigError("particle count must be at least 1");
  }
  if (!(resample_threshold > 0.0) || resample_threshold > particles) {
    throw ConfigError("resample threshold must lie in (0, particles]");
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("epsilon must be positive");
  }
  if (!(world.dt > 0.0)) {
    throw ConfigError("sample time must be positive");
  }
  try {
    tuning.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

Ensemble initialize(const FilterConfig& config) {
  config.validate();
  const ErrorCov root = robust_cholesky(config.init_cov);
  Ensemble ensemble;
  ensemble.particles.resize(static_cast<std::size_t>(config.particles));
  const double w = 1.0 / config.particles;
  for (std::size_t i = 0; i < ensemble.particles.size(); ++i) {
    auto rng = RandomStream::substream(config.seed, 0, i, kInitTag);
    Particle& p = ensemble.particles[i];
    p.sample = state_boxplus(config.init_mean, rng.gaussian(root));
    p.weight = w;
    p.ukf = {p.sample, config.init_cov};
    p.prior = p.ukf;
  }
  return ensemble;
}

void predict_step(Ensemble& ensemble, const ImuSample& u, double dt, const FilterConfig& config,
                  const WorkerPool& pool) {
  WorldParams world = config.world;
  world.dt = dt;
  for_each_particle(pool, ensemble.particles.size(), [&](std::size_t i) {
    Particle& p = ensemble.particles[i];
    const SigmaPointSet sigma = sigma_points(augment(p.ukf, config.imu_noise), config.tuning);
    TimeUpdateResult result = time_update(sigma, u, world, config.imu_noise);
    p.ukf = result.predicted;
    p.prior = result.predicted;
    p.propagated = std::move(result.points);
    p.sample = p.ukf.mean;
    p.has_prediction = true;
  });
  ++ensemble.step;
}

void update_step(Ensemble& ensemble, const LandmarkFrame& frame, const FilterConfig& config,
                 const WorkerPool& pool) {
  const Eigen::Index m_z = frame.measurement_dim();
  if (m_z == 0) {
    throw PreconditionError("update_step: empty landmark frame");
  }
  const Eigen::VectorXd z = frame.stacked_body();
  const std::vector<Vec3> world_points = frame.world_points();
  const Eigen::MatrixXd landmark_cov = config.landmark_noise.covariance(m_z);
  const Eigen::MatrixXd landmark_root = robust_cholesky(landmark_cov);
  const double log_eps = std::log(config.epsilon);

  std::vector<double> log_weights(ensemble.particles.size());
  for_each_particle(pool, ensemble.particles.size(), [&](std::size_t i) {
    Particle& p = ensemble.particles[i];
    if (!p.has_prediction) {
      throw PreconditionError("update_step: particle has no prediction");
    }
    const UkfMoments prior = p.ukf;
    const MeasurementUpdateResult mu =
        measurement_update(prior, p.propagated, z, world_points, landmark_cov);
    const UkfMoments& posterior = mu.posterior;

    const ErrorCov posterior_root = robust_cholesky(posterior.cov);
    const ErrorCov prior_root = robust_cholesky(prior.cov);
    const NavState& centre =
        config.proposal == ProposalMode::StandardUpf ? posterior.mean : prior.mean;
    auto rng = RandomStream::substream(config.seed, ensemble.step, i, kProposalTag);
    const NavState sample = state_boxplus(centre, rng.gaussian(posterior_root));

    const double log_likelihood = gaussian_logpdf_factored(
        z - landmark_h(sample, world_points), landmark_root);
    const double log_transition = gaussian_logpdf_factored(
        Eigen::VectorXd(state_difference(sample, prior.mean)), Eigen::MatrixXd(prior_root));
    const double log_proposal = gaussian_logpdf_factored(
        Eigen::VectorXd(state_difference(sample, posterior.mean)), Eigen::MatrixXd(posterior_root));

    // L * T / (Q + eps); the outer + eps is added after rescaling below
    log_weights[i] = log_likelihood + log_transition - log_add_exp(log_proposal, log_eps);

    p.prior = prior;
    p.ukf = posterior;
    p.sample = sample;
    p.has_prediction = false;
  });

  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    // relative to the best particle, so eps floors weights on the same scale
    // whatever the absolute magnitude of the densities
    const double w = std::exp(log_weights[i] - top) + config.epsilon;
    ensemble.particles[i].weight = w;
    total += w;
  }
  for (auto& p : ensemble.particles) {
    p.weight /= total;
  }
}

double effective_sample_size(std::span<const double> weights) {
  double sum_sq = 0.0;
  for (double w : weights) {
    sum_sq += w * w;
  }
  return 1.0 / sum_sq;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u0) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> picks(n);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double cumulative = weights.empty() ? 0.0 : weights[0] / total;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double position = (u0 + static_cast<double>(i)) / static_cast<double>(n);
    while (position >= cumulative && j + 1 < n) {
      ++j;
      cumulative += weights[j] / total;
    }
    picks[i] = j;
  }
  return picks;
}

ResampleOutcome resample_if_needed(Ensemble& ensemble, const FilterConfig& config) {
  std::vector<double> weights;
  weights.reserve(ensemble.particles.size());
  for (const auto& p : ensemble.particles) {
    weights.push_back(p.weight);
  }
  ResampleOutcome out;
  out.ess = effective_sample_size(weights);
  if (!(out.ess < config.resample_threshold)) {
    return out;
  }
  const std::size_t n = ensemble.particles.size();
  auto rng = RandomStream::substream(config.seed, ensemble.step, n, kResampleTag);
  const auto picks = systematic_resample(weights, rng.uniform());
  std::vector<Particle> next;
  next.reserve(n);
  for (std::size_t idx : picks) {
    next.push_back(ensemble.particles[idx]);
  }
  for (auto& p : next) {
    p.weight = 1.0 / static_cast<double>(n);
  }
  ensemble.particles = std::move(next);
  out.resampled = true;
  return out;
}

NavState estimate(Ensemble& ensemble) {
  const std::size_t n = ensemble.particles.size();
  if (n == 0) {
    throw PreconditionError("estimate: empty ensemble");
  }
  std::vector<Quaternion> quats(n);
  std::vector<double> weights(n);
  NavState out;
  out.p.setZero();
  out.v.setZero();
  out.bias_gyro.setZero();
  out.bias_accel.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    const Particle& p = ensemble.particles[i];
    quats[i] = p.sample.q;
    weights[i] = p.weight;
    out.p += p.weight * p.sample.p;
    out.v += p.weight * p.sample.v;
    out.bias_gyro += p.weight * p.sample.bias_gyro;
    out.bias_accel += p.weight * p.sample.bias_accel;
  }
  out.q = quat_weighted_mean(quats, weights);
  for (auto& p : ensemble.particles) {
    p.ukf.mean = p.sample;
  }
  return out;
}

}  // namespace quatnav
