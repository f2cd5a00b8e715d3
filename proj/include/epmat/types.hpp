#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace epmat {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Base factor for minor-sign decisions. The effective threshold for a k-th
/// order minor scales with the submatrix magnitude; see minor_tolerance().
inline constexpr double kDefaultTolBase = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (matrix / vector / scenario documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds a documented enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A computation left the representable range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid argument: shape mismatch, non-finite entries, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Throws DomainError when any entry is NaN or infinite.
inline void require_finite(const Matrix& A, const std::string& what) {
  if (!A.allFinite()) {
    throw DomainError(what + ": matrix has non-finite entries");
  }
}

/// Throws DomainError unless A is square with at least one row.
inline void require_square(const Matrix& A, const std::string& what) {
  if (A.rows() != A.cols() || A.rows() < 1) {
    throw DomainError(what + ": matrix must be square and nonempty");
  }
}

}  // namespace epmat
