#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace becq {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kI{0.0, 1.0};

// Error categories. The cli maps ArgumentError to exit code 1 and the
// numerical ones to exit code 2.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalIntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedMappingError : ArgumentError {
  using ArgumentError::ArgumentError;
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, double last_good)
      : std::runtime_error(what), last_good_time(last_good) {}
  double last_good_time;
};

}  // namespace becq
