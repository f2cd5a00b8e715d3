#include "epmat/expm.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace epmat {

namespace {

// Degree-13 diagonal Pade coefficients.
constexpr double kB[14] = {64764752532480000.0,
                           32382376266240000.0,
                           7771770303897600.0,
                           1187353796428800.0,
                           129060195264000.0,
                           10559470521600.0,
                           670442572800.0,
                           33522128640.0,
                           1323241920.0,
                           40840800.0,
                           960960.0,
                           16380.0,
                           182.0,
                           1.0};

// Largest 1-norm for which the unscaled degree-13 approximant meets double
// precision.
constexpr double kTheta13 = 5.371920351148152;

}  // namespace

Matrix expm(const Matrix& A, double t) {
  require_square(A, "expm");
  require_finite(A, "expm");
  if (!std::isfinite(t)) throw DomainError("expm: t must be finite");

  const auto n = A.rows();
  Matrix B = A * t;
  if (!B.allFinite()) {
    std::ostringstream os;
    os << "expm: A*t overflows at t=" << t;
    throw OverflowError(os.str());
  }

  double norm1 = B.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > kTheta13) {
    s = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  B *= std::ldexp(1.0, -s);

  const Matrix I = Matrix::Identity(n, n);
  const Matrix B2 = B * B;
  const Matrix B4 = B2 * B2;
  const Matrix B6 = B4 * B2;

  Matrix U = B * (B6 * (kB[13] * B6 + kB[11] * B4 + kB[9] * B2) +
                  kB[7] * B6 + kB[5] * B4 + kB[3] * B2 + kB[1] * I);
  Matrix V = B6 * (kB[12] * B6 + kB[10] * B4 + kB[8] * B2) + kB[6] * B6 +
             kB[4] * B4 + kB[2] * B2 + kB[0] * I;

  Eigen::PartialPivLU<Matrix> lu(V - U);
  Matrix F = lu.solve(U + V);
  for (int i = 0; i < s; ++i) F = F * F;

  if (!F.allFinite()) {
    std::ostringstream os;
    os << "expm: result overflows at t=" << t;
    throw OverflowError(os.str());
  }
  return F;
}

SpectralInfo spectrum(const Matrix& A, double real_tol) {
  require_square(A, "spectrum");
  require_finite(A, "spectrum");

  Eigen::EigenSolver<Matrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError(
        "spectrum: QR iteration did not converge within " +
        std::to_string(40 * A.rows()) + " iterations");
  }

  SpectralInfo out;
  out.eigenvalues = solver.eigenvalues();
  out.real_tolerance = real_tol;
  out.spectral_radius = 0.0;
  out.all_real = true;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    const Complex lam = out.eigenvalues(i);
    out.spectral_radius = std::max(out.spectral_radius, std::abs(lam));
    if (std::abs(lam.imag()) > real_tol * (1.0 + std::abs(lam))) {
      out.all_real = false;
    }
  }
  return out;
}

}  // namespace epmat
