#pragma once

#include "epmat/types.hpp"

namespace epmat {

/// exp(A*t) by scaling-and-squaring with the diagonal degree-13 Pade
/// approximant. Throws OverflowError (naming t) when the result leaves the
/// representable range.
Matrix expm(const Matrix& A, double t = 1.0);

struct SpectralInfo {
  ComplexVector eigenvalues;  // solver order
  double spectral_radius = 0.0;
  /// True when every eigenvalue satisfies |Im| <= real_tolerance * (1 + |lambda|).
  bool all_real = false;
  double real_tolerance = kDefaultTolBase;
};

/// Dense nonsymmetric eigensolve (Hessenberg + QR). Throws NumericError when
/// the QR iteration fails to converge.
SpectralInfo spectrum(const Matrix& A, double real_tol = kDefaultTolBase);

}  // namespace epmat
