#pragma once

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "quatnav/errors.hpp"

namespace quatnav {

namespace detail {

/// Index of the first non-positive pivot met by an unpivoted Cholesky sweep,
/// or -1 if the matrix factors.
int first_failing_pivot(const Eigen::MatrixXd& m);

}  // namespace detail

/**
 * Lower Cholesky factor with the repository-wide jitter policy.
 *
 * The input is symmetrized first. If the factorization fails, a diagonal load
 * of 1e-9 * tr(P) / n is added and doubled up to three times. An exactly zero
 * matrix returns a zero factor. Throws NumericalError with the failing pivot.
 */
template <typename Derived>
typename Derived::PlainObject robust_cholesky(const Eigen::MatrixBase<Derived>& p) {
  using Matrix = typename Derived::PlainObject;
  const Matrix sym = 0.5 * (p + p.transpose());
  if (!sym.allFinite()) {
    throw NumericalError("covariance contains non-finite entries", -1);
  }
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  const auto n = static_cast<double>(sym.rows());
  const double trace = sym.trace();
  if (trace == 0.0 && sym.isZero(0.0)) {
    return Matrix::Zero(sym.rows(), sym.cols());
  }
  double load = 1e-9 * std::abs(trace) / n;
  for (int attempt = 0; attempt < 4; ++attempt, load *= 2.0) {
    Matrix loaded = sym;
    loaded.diagonal().array() += load;
    llt.compute(loaded);
    if (llt.info() == Eigen::Success) {
      return llt.matrixL();
    }
  }
  const int pivot = detail::first_failing_pivot(Eigen::MatrixXd(sym));
  throw NumericalError("covariance is not positive definite (pivot " + std::to_string(pivot) + ")",
                       pivot);
}

/// log N(a | mean, cov), evaluated through the Cholesky factor of `cov`.
double gaussian_logpdf(const Eigen::VectorXd& a, const Eigen::VectorXd& mean,
                       const Eigen::MatrixXd& cov);

/// Same density with a precomputed lower factor of the covariance.
double gaussian_logpdf_factored(const Eigen::VectorXd& residual, const Eigen::MatrixXd& lower);

}  // namespace quatnav
