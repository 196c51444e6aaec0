#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace monosphere {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat2c = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using MatXc = Eigen::MatrixXcd;
using VecXc = Eigen::VectorXcd;
using VecX = Eigen::VectorXd;

inline constexpr Complex I{0.0, 1.0};

// Error taxonomy. Numerical failures (exit code 2 in the CLI) derive from
// NumericalError; contract violations derive from std::invalid_argument.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParams : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadTwist : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotUnitary : NumericalError {
  using NumericalError::NumericalError;
};
struct Singular : NumericalError {
  using NumericalError::NumericalError;
};
struct ChartSingularity : NumericalError {
  using NumericalError::NumericalError;
};
struct StepTooLarge : NumericalError {
  using NumericalError::NumericalError;
};
struct NoConvergence : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateStart : NumericalError {
  using NumericalError::NumericalError;
};
struct Overflow : NumericalError {
  using NumericalError::NumericalError;
};
struct SignMismatch : NumericalError {
  using NumericalError::NumericalError;
};
struct BranchCut : NumericalError {
  using NumericalError::NumericalError;
};
struct QuadratureNotConverged : NumericalError {
  using NumericalError::NumericalError;
};
struct ChartDegeneracy : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace monosphere
