#pragma once

// Independent reference implementations used only by the tests. None of them
// call into the library's numerics.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "quatnav/kinematics.hpp"

namespace quatnav::test {

/// exp(A) by scaling and squaring with a truncated Taylor series.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// log N(a | mean, cov) from an explicit inverse and determinant.
double naive_logpdf(const Eigen::VectorXd& a, const Eigen::VectorXd& mean,
                    const Eigen::MatrixXd& cov);

/// Textbook linear Kalman filter.
struct LinearKf {
  Eigen::VectorXd x;
  Eigen::MatrixXd p;

  void predict(const Eigen::MatrixXd& f, const Eigen::VectorXd& control,
               const Eigen::MatrixXd& q);
  void update(const Eigen::MatrixXd& h, const Eigen::VectorXd& z, const Eigen::MatrixXd& r);
};

/// Central-difference Jacobian of f at x.
Eigen::MatrixXd numerical_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h);

/// Rotation matrix of a rotation vector by Rodrigues' formula.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& r);

Eigen::Vector4d random_unit4(std::mt19937_64& rng);
Eigen::Vector3d random_vec3(std::mt19937_64& rng, double scale);
/// Uniform direction with norm uniform in [0, max_norm].
Eigen::Vector3d random_rotvec(std::mt19937_64& rng, double max_norm);
Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale);
NavState random_state(std::mt19937_64& rng);

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);
std::string read_file(const std::filesystem::path& file);

/// Directory holding the shipped config files.
std::filesystem::path config_dir();

}  // namespace quatnav::test
