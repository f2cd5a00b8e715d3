#include "epmat/pclass.hpp"

#include "epmat/compound.hpp"
#include "epmat/expm.hpp"
#include "epmat/minor.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

namespace epmat {

namespace {

void require_principal_capacity(const Matrix& A, const char* what) {
  require_square(A, what);
  require_finite(A, what);
  if (A.rows() > kMaxPrincipalMinorOrder) {
    throw CapacityError(std::string(what) + ": n > 16 means 2^n - 1 minors; " +
                        "use sign_reversal_search for sampled falsification");
  }
}

}  // namespace

std::vector<std::pair<IndexSet, double>> principal_minors(const Matrix& A) {
  require_principal_capacity(A, "principal_minors");
  const int n = static_cast<int>(A.rows());

  std::vector<std::pair<IndexSet, double>> out;
  out.reserve((std::size_t{1} << n) - 1);
  for (int k = 1; k <= n; ++k) {
    for (const IndexSet& alpha : enumerate_index_sets(k, n)) {
      out.emplace_back(alpha, minor_of(A, alpha, alpha));
    }
  }
  return out;
}

PVerdict is_p_matrix(const Matrix& A, double tol_base) {
  require_principal_capacity(A, "is_p_matrix");
  const int n = static_cast<int>(A.rows());

  PVerdict v;
  v.is_p = true;
  v.min_principal_minor = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= n; ++k) {
    for (const IndexSet& alpha : enumerate_index_sets(k, n)) {
      const double m = minor_of(A, alpha, alpha);
      const double tol = minor_tolerance(tol_base, A, alpha, alpha);
      if (m < v.min_principal_minor) {
        v.min_principal_minor = m;
        if (!v.failing_minor) v.tolerance_used = tol;
      }
      if (std::abs(m) <= tol) v.marginal = true;
      if (m <= tol && !v.failing_minor) {
        v.is_p = false;
        v.failing_minor = {alpha, m};
        v.tolerance_used = tol;
      }
    }
  }
  return v;
}

bool is_p0_matrix(const Matrix& A, double tol_base) {
  require_principal_capacity(A, "is_p0_matrix");
  const int n = static_cast<int>(A.rows());
  for (int k = 1; k <= n; ++k) {
    for (const IndexSet& alpha : enumerate_index_sets(k, n)) {
      if (minor_of(A, alpha, alpha) <
          -minor_tolerance(tol_base, A, alpha, alpha)) {
        return false;
      }
    }
  }
  return true;
}

bool is_q_matrix(const Matrix& A, double tol_base) {
  require_principal_capacity(A, "is_q_matrix");
  const int n = static_cast<int>(A.rows());
  const double scale = A.cwiseAbs().maxCoeff();
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (const IndexSet& alpha : enumerate_index_sets(k, n)) {
      sum += minor_of(A, alpha, alpha);
    }
    if (sum <= tol_base * std::max(1.0, std::pow(scale, k))) return false;
  }
  return true;
}

bool is_sign_symmetric(const Matrix& A, double tol_base) {
  require_square(A, "is_sign_symmetric");
  require_finite(A, "is_sign_symmetric");
  const int n = static_cast<int>(A.rows());
  if (n > kMaxSignSymmetryOrder) {
    throw CapacityError("is_sign_symmetric: n > 10 means C(2n,n)-1 minor "
                        "products; refusing");
  }
  const double scale = A.cwiseAbs().maxCoeff();
  for (int k = 1; k <= n; ++k) {
    const Matrix M = mult_compound(A, k).data;
    const double tol = tol_base * std::max(1.0, std::pow(scale, 2 * k));
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      for (Eigen::Index c = r; c < M.cols(); ++c) {
        if (M(r, c) * M(c, r) < -tol) return false;
      }
    }
  }
  return true;
}

bool is_sign_pattern_symmetric(const Matrix& A, double tol_base) {
  require_square(A, "is_sign_pattern_symmetric");
  require_finite(A, "is_sign_pattern_symmetric");
  const double scale = A.cwiseAbs().maxCoeff();
  const double tol = tol_base * std::max(1.0, scale * scale);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < A.cols(); ++j) {
      if (A(i, j) * A(j, i) < -tol) return false;
    }
  }
  return true;
}

KelloggResult kellogg_wedge_check(const Matrix& A, double tol_base) {
  require_square(A, "kellogg_wedge_check");
  require_finite(A, "kellogg_wedge_check");
  const int n = static_cast<int>(A.rows());

  KelloggResult out;
  if (n == 1) {
    out.passes = A(0, 0) > tol_base * std::max(1.0, std::abs(A(0, 0)));
    if (!out.passes) out.violating_eigenvalue = Complex(A(0, 0), 0.0);
    return out;
  }

  const SpectralInfo info = spectrum(A);
  const double wedge = M_PI - M_PI / n;
  out.passes = true;
  for (Eigen::Index i = 0; i < info.eigenvalues.size(); ++i) {
    const Complex lam = info.eigenvalues(i);
    if (std::abs(lam) <= tol_base * (1.0 + info.spectral_radius)) continue;
    if (std::abs(std::arg(lam)) >= wedge - tol_base) {
      out.passes = false;
      out.violating_eigenvalue = lam;
      return out;
    }
  }
  return out;
}

namespace {

// Acceptance floor for x_i(Ax)_i products at unit-infinity-norm x.
double product_floor(const Matrix& A) {
  const double eps = std::numeric_limits<double>::epsilon();
  return 16.0 * static_cast<double>(A.rows()) * eps *
         std::max(1.0, A.cwiseAbs().maxCoeff());
}

std::optional<SignReversalWitness> accept_witness(const Matrix& A, Vector x) {
  const double nx = x.cwiseAbs().maxCoeff();
  if (!(nx > 0.0) || !x.allFinite()) return std::nullopt;
  x /= nx;
  const Vector p = x.cwiseProduct(A * x);
  if (p.maxCoeff() <= product_floor(A)) {
    return SignReversalWitness{std::move(x), p};
  }
  return std::nullopt;
}

// Candidate directions from a real eigenvalue <= 0 of the alpha-principal
// submatrix, embedded with zeros outside alpha. For i in alpha the product
// is lambda * v_i^2 <= 0; outside it is 0.
std::optional<SignReversalWitness> eigen_screen(const Matrix& A,
                                                const IndexSet& alpha,
                                                const Matrix& sub) {
  Eigen::EigenSolver<Matrix> solver(sub, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const auto& lam = solver.eigenvalues();
  const double scale = 1.0 + sub.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    if (std::abs(lam(j).imag()) > 1e-9 * (1.0 + std::abs(lam(j)))) continue;
    if (lam(j).real() > 1e-12 * scale) continue;
    const ComplexVector vc = solver.eigenvectors().col(j);
    for (const bool real_part : {true, false}) {
      Vector v = real_part ? Vector(vc.real()) : Vector(vc.imag());
      if (v.cwiseAbs().maxCoeff() <= 1e-10) continue;
      Vector x = Vector::Zero(A.rows());
      const auto& el = alpha.elems();
      for (int r = 0; r < alpha.size(); ++r) x(el[r] - 1) = v(r);
      if (auto w = accept_witness(A, std::move(x))) return w;
    }
  }
  return std::nullopt;
}

// Within the closed orthant given by signs s: with B = SAS, shrink u >= 0
// until every coordinate has u_i = 0 or u_i (Bu)_i <= 0.
std::optional<SignReversalWitness> orthant_refine(const Matrix& A,
                                                  const Vector& s, Vector u) {
  const Matrix B = s.asDiagonal() * A * s.asDiagonal();
  const int n = static_cast<int>(A.rows());
  for (int iter = 0; iter < 64 + 24 * n; ++iter) {
    const Vector g = B * u;
    bool settled = true;
    for (int i = 0; i < n; ++i) {
      if (u(i) > 0.0 && u(i) * g(i) > 0.0) {
        settled = false;
        u(i) *= 0.25;
        if (u(i) < 1e-13) u(i) = 0.0;
      }
    }
    if (settled) return accept_witness(A, s.cwiseProduct(u));
    if (u.maxCoeff() <= 0.0) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<SignReversalWitness> sign_reversal_search(const Matrix& A,
                                                        int trials,
                                                        std::uint64_t seed) {
  require_square(A, "sign_reversal_search");
  require_finite(A, "sign_reversal_search");
  const int n = static_cast<int>(A.rows());

  for (int i = 0; i < n; ++i) {
    if (A(i, i) <= 0.0) {
      if (auto w = accept_witness(A, Vector::Unit(n, i))) return w;
    }
  }

  if (auto w = eigen_screen(A, IndexSet::full(n), A)) return w;
  if (n <= 8) {
    for (int k = 2; k < n; ++k) {
      for (const IndexSet& alpha : enumerate_index_sets(k, n)) {
        if (auto w = eigen_screen(A, alpha, submatrix(A, alpha, alpha))) {
          return w;
        }
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_start = [&] {
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = 0.05 + unit(rng);
    return u;
  };

  // s and -s describe the same orthant pair, so the leading sign is pinned.
  if (n <= 12) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1));
         ++mask) {
      Vector s(n);
      s(0) = 1.0;
      for (int i = 1; i < n; ++i) {
        s(i) = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      }
      if (auto w = orthant_refine(A, s, Vector::Ones(n))) return w;
      if (auto w = orthant_refine(A, s, random_start())) return w;
    }
  }

  for (int t = 0; t < trials; ++t) {
    Vector s(n);
    for (int i = 0; i < n; ++i) s(i) = unit(rng) < 0.5 ? -1.0 : 1.0;
    if (auto w = orthant_refine(A, s, random_start())) return w;
  }
  return std::nullopt;
}

std::optional<double> nonneg_horizon(const Matrix& A) {
  require_square(A, "nonneg_horizon");
  require_finite(A, "nonneg_horizon");
  if ((A.array() < 0.0).any()) return std::nullopt;
  const double rho = spectrum(A).spectral_radius;
  if (rho <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / rho;
}

}  // namespace epmat
