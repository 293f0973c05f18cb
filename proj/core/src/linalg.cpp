#include "quatnav/linalg.hpp"

#include <numbers>

namespace quatnav {

namespace detail {

int first_failing_pivot(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) {
      return static_cast<int>(j);
    }
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (m(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return -1;
}

}  // namespace detail

double gaussian_logpdf_factored(const Eigen::VectorXd& residual, const Eigen::MatrixXd& lower) {
  const auto n = static_cast<double>(residual.size());
  const Eigen::VectorXd y = lower.triangularView<Eigen::Lower>().solve(residual);
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  return -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det + y.squaredNorm());
}

double gaussian_logpdf(const Eigen::VectorXd& a, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov) {
  if (a.size() != mean.size() || cov.rows() != a.size() || cov.cols() != a.size()) {
    throw PreconditionError("gaussian_logpdf: dimension mismatch");
  }
  const Eigen::MatrixXd lower = robust_cholesky(cov);
  if ((lower.diagonal().array() <= 0.0).any()) {
    throw NumericalError("gaussian_logpdf: singular covariance", 0);
  }
  return gaussian_logpdf_factored(a - mean, lower);
}

}  // namespace quatnav
