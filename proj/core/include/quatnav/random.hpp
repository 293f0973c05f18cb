#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace quatnav {

/// Deterministic random stream. Substreams are keyed by (seed, step, index,
/// tag) so that work split across threads draws identical numbers.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream substream(std::uint64_t seed, std::uint64_t step, std::uint64_t index,
                                std::uint64_t tag = 0);

  double uniform();
  double normal();

  Eigen::VectorXd standard_normal(Eigen::Index n);

  /// Sample N(0, L L^T) given a square-root factor L.
  template <typename Derived>
  Eigen::Matrix<double, Derived::RowsAtCompileTime, 1> gaussian(
      const Eigen::MatrixBase<Derived>& factor) {
    Eigen::Matrix<double, Derived::ColsAtCompileTime, 1> z(factor.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      z[i] = normal();
    }
    return factor * z;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Symmetric square root of a positive semidefinite matrix (negative
/// eigenvalues from round-off are clamped to zero).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov);

}  // namespace quatnav
