#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace berglab {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ----------------------------------------------------------------------------
// Error taxonomy. Numeric degeneracies are distinguished from bad input so the
// CLI can map them to distinct exit codes.
// ----------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class EmptyDomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateGramError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateMetricError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ZeroKernelError : public NumericError {
 public:
  using NumericError::NumericError;
};

class PoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

class StepTooLargeError : public NumericError {
 public:
  using NumericError::NumericError;
};

class RankDeficiencyError : public NumericError {
 public:
  using NumericError::NumericError;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionMismatchError(std::string(what) + ": dimension " +
                                 std::to_string(got) + ", expected " +
                                 std::to_string(want));
  }
}

inline bool all_finite(const ComplexVector& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
  }
  return true;
}

}  // namespace berglab
