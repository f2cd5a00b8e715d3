#pragma once

#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace epmat {

/// Largest n for which all 2^n - 1 principal minors are enumerated.
inline constexpr int kMaxPrincipalMinorOrder = 16;

/// Largest n for the all-pairs sign-symmetry check (sum over k of C(n,k)^2
/// minor products).
inline constexpr int kMaxSignSymmetryOrder = 10;

/// All nonempty principal minors, ordered by (k, lexicographic rank).
std::vector<std::pair<IndexSet, double>> principal_minors(const Matrix& A);

struct PVerdict {
  bool is_p = false;
  /// First minor at or below threshold, in (k, rank) order.
  std::optional<std::pair<IndexSet, double>> failing_minor;
  double min_principal_minor = 0.0;
  /// Threshold at the reported minor (failing one, else the minimal one).
  double tolerance_used = 0.0;
  /// Some minor sits within its own threshold band of zero; the verdict is
  /// then a coin-flip away from the other side.
  bool marginal = false;
};

/// A is a P-matrix iff every principal minor exceeds its scale-aware
/// threshold tol_base * max(1, maxabs^k).
PVerdict is_p_matrix(const Matrix& A, double tol_base = kDefaultTolBase);

/// All principal minors >= -threshold.
bool is_p0_matrix(const Matrix& A, double tol_base = kDefaultTolBase);

/// For every order k, the sum of the k-by-k principal minors is positive.
bool is_q_matrix(const Matrix& A, double tol_base = kDefaultTolBase);

/// A(alpha|beta) * A(beta|alpha) >= -threshold for all equal-size pairs.
bool is_sign_symmetric(const Matrix& A, double tol_base = kDefaultTolBase);

/// a_ij * a_ji >= -threshold entrywise.
bool is_sign_pattern_symmetric(const Matrix& A,
                               double tol_base = kDefaultTolBase);

struct KelloggResult {
  bool passes = false;
  std::optional<Complex> violating_eigenvalue;
};

/// Eigenvalue wedge test: every eigenvalue must satisfy
/// |arg(lambda)| < pi - pi/n. A violation certifies the matrix is not a
/// Q-matrix, hence not a P-matrix. For n=1 the wedge degenerates; the test
/// is then lambda > tol directly.
KelloggResult kellogg_wedge_check(const Matrix& A,
                                  double tol_base = kDefaultTolBase);

struct SignReversalWitness {
  Vector x;
  /// products[i] = x_i * (Ax)_i, all at or below the acceptance floor.
  Vector products;
};

/// Randomized search for x != 0 with x_i(Ax)_i <= 0 for all i. A returned
/// witness certifies the matrix is not P; absence certifies nothing.
std::optional<SignReversalWitness> sign_reversal_search(
    const Matrix& A, int trials = 2000, std::uint64_t seed = 0);

/// For entrywise-nonnegative A: 1/rho(A), a horizon below which exp(At) is
/// guaranteed P (infinity when rho = 0). Absent when A has a negative entry.
std::optional<double> nonneg_horizon(const Matrix& A);

}  // namespace epmat
