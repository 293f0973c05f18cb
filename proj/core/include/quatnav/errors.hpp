#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quatnav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A factorization or solve failed. Carries the failing pivot and, when the
/// failure happened inside the particle layer, the particle index.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int pivot, int particle = -1)
      : Error(what), pivot_(pivot), particle_(particle) {}

  int pivot() const noexcept { return pivot_; }
  int particle() const noexcept { return particle_; }

 private:
  int pivot_;
  int particle_;
};

/// The dominant eigenvalue of a quaternion scatter matrix is not unique.
class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, double eigen_gap)
      : Error(what), eigen_gap_(eigen_gap) {}

  double eigen_gap() const noexcept { return eigen_gap_; }

 private:
  double eigen_gap_;
};

/// Malformed input data. `line` and `column` are 1-based; 0 means unknown.
class IngestError : public Error {
 public:
  IngestError(const std::string& file, std::size_t line, std::size_t column,
              const std::string& message)
      : Error(file + ":" + std::to_string(line) + ":" + std::to_string(column) +
              ": " + message),
        file_(file),
        line_(line),
        column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

/// Timestamps that must be increasing are not.
class OrderingError : public IngestError {
 public:
  using IngestError::IngestError;
};

/// Invalid or unknown configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace quatnav
