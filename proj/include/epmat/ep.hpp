#pragma once

#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace epmat {

/// Largest n the grid falsifier handles (per-order compound scan).
inline constexpr int kMaxFalsifierOrder = 12;

/// Largest n for the eigenbasis minor-product certificate.
inline constexpr int kMaxMinorSymmetryOrder = 10;

/// Largest n for the perturbation / power screens.
inline constexpr int kMaxScreenOrder = 8;

enum class EPCertificateKind {
  TwoByTwoSign,
  Triangular,
  Symmetric,
  Jacobi,
  WeakJacobi,
  DiagSymmetrizable,
  BlockReduction,
  MinorSymmetry,
  SignSymProjection,
  TransformOf,
};

enum class EPTransform {
  scale,
  transpose,
  perm_similarity,
  pos_diag_similarity,
  signature_similarity,
  commuting_diag_shift,
  negate,
};

const char* to_string(EPCertificateKind k);
const char* to_string(EPTransform t);

/// Checkable evidence that exp(At) stays inside the P-matrices for all t.
/// Leaves carry a directly re-checkable predicate on the stored matrix;
/// TransformOf wraps one child plus a property-preserving map;
/// BlockReduction wraps one child per irreducible diagonal block.
struct EPCertificate {
  EPCertificateKind kind = EPCertificateKind::Triangular;

  /// The matrix this node certifies.
  Matrix matrix;

  /// TransformOf: matrix = transform(children[0].matrix, parameters below).
  EPTransform transform = EPTransform::scale;
  double scale_factor = 1.0;

  /// pos_diag_similarity / signature_similarity / commuting_diag_shift
  /// parameter; also the recomputed symmetrizer stored on Jacobi leaves.
  Vector diagonal;

  /// perm_similarity and BlockReduction: position -> original index, 1-based.
  std::vector<int> permutation;

  /// BlockReduction: diagonal block sizes in permutation order.
  std::vector<int> block_sizes;

  /// MinorSymmetry payload. r_tables[k-1](rank a, rank b) =
  /// s(a,b) * T(a|b) * T(a^c|b^c); tables kept only while C(n,k) stays small.
  Matrix eigenvectors;
  Vector eigenvalues;
  double basis_determinant = 0.0;
  std::vector<Matrix> r_tables;

  std::vector<EPCertificate> children;

  /// One-line route description, outermost wrapper first.
  std::string summary() const;

  /// Re-checks the defining predicate of this node and all children
  /// against the stored matrices.
  bool verify(double tol_base = kDefaultTolBase) const;
};

enum class EPStatus { EP, NotEP, Undecided };
const char* to_string(EPStatus s);

struct EPWitness {
  double t;
  IndexSet alpha;
  double minor_value;
};

struct GridEvidence {
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  double min_minor = std::numeric_limits<double>::infinity();
  double min_minor_t = 0.0;
  /// Part of the grid was dropped because exp(At) left the representable
  /// range there.
  bool truncated = false;
};

struct EPVerdict {
  EPStatus status = EPStatus::Undecided;
  std::optional<EPCertificate> certificate;
  std::optional<EPWitness> witness;
  /// The spectrum has a non-real eigenvalue (already decides NotEP).
  bool complex_spectrum = false;
  GridEvidence evidence;
  std::vector<std::string> notes;
};

/// Exact n=2 decision: EP iff a12*a21 >= 0. The NotEP branch carries an
/// analytically located witness, refined until the minor is strictly
/// negative beyond its rounding floor.
EPVerdict check_2x2(const Matrix& A, double tol_base = kDefaultTolBase);

/// First matching structural shape, in order: triangular, symmetric,
/// Jacobi, weak Jacobi, positive-diagonal symmetrizability.
std::optional<EPCertificate> structural_certificates(
    const Matrix& A, double tol_base = kDefaultTolBase);

struct BlockDecomposition {
  /// Position -> original index, 1-based; conjugating by it makes the
  /// matrix block upper triangular.
  std::vector<int> permutation;
  std::vector<int> block_sizes;
  std::vector<Matrix> blocks;
};

/// Strongly connected components of the nonzero-pattern digraph, ordered so
/// the permuted matrix is block upper triangular.
BlockDecomposition block_reduce(const Matrix& A,
                                double tol_base = kDefaultTolBase);

/// r-table of a basis T at order k: entry (rank alpha, rank beta) =
/// s(alpha,beta) * T(alpha|beta) * T(complement alpha|complement beta).
Matrix minor_symmetry_products(const Matrix& T, int k);

enum class MinorSymmetryOutcome {
  certified,
  condition_fails,
  /// Complex/defective spectrum or ill-conditioned eigenbasis; the test
  /// does not apply (distinct from failing it).
  not_applicable,
};

struct MinorSymmetryResult {
  MinorSymmetryOutcome outcome = MinorSymmetryOutcome::not_applicable;
  std::optional<EPCertificate> certificate;
  std::string detail;
};

MinorSymmetryResult minor_symmetry_certificate(
    const Matrix& A, double tol_base = kDefaultTolBase);

/// Exact certificate for the weak-Jacobi class only.
std::optional<EPCertificate> tn_perturbation_certificate(
    const Matrix& A, double tol_base = kDefaultTolBase);

struct TNScreenFailure {
  double eps;
  IndexSet rows, cols;
  double value;
};

struct TNScreenReport {
  bool all_pass = true;
  long checks = 0;
  std::optional<TNScreenFailure> first_failure;
};

/// Evidence-only screen: every minor of I + eps*A nonnegative for sampled
/// eps. Never a certificate.
TNScreenReport tn_screen(const Matrix& A,
                         const std::vector<double>& eps_grid = {},
                         double tol_base = kDefaultTolBase);

struct PowerScreenFailure {
  double eps;
  int k;
  int ell;
};

struct PowerScreenReport {
  bool all_pass = true;
  long checks = 0;
  std::optional<PowerScreenFailure> first_failure;
};

/// Evidence-only screen: sign-pattern symmetry of ((I+eps*A)^(k))^ell over
/// the sampled grids. Never a certificate.
PowerScreenReport power_sign_symmetry_screen(
    const Matrix& A, const std::vector<double>& eps_grid = {},
    int ell_max = 40, int k_max = 0, double tol_base = kDefaultTolBase);

/// A^2 = A plus sign-symmetry.
std::optional<EPCertificate> projection_certificate(
    const Matrix& A, double tol_base = kDefaultTolBase);

struct TimeGridSpec {
  /// <= 0 picks max(10, 10 / smallest nonzero eigenvalue separation).
  double t_max = 0.0;
  int log_points = 512;
  int linear_points = 512;
  bool include_negative = true;
};

struct FalsifyResult {
  std::optional<EPWitness> witness;
  bool complex_spectrum = false;
  GridEvidence evidence;
};

/// Scans the diagonals of exp(A^[k] t) over the time grid for a nonpositive
/// entry (a principal minor of exp(At)); every candidate is re-verified by
/// a direct minor and only accepted while strictly negative beyond its
/// rounding floor. A non-real spectrum short-circuits to a witness near
/// t = (n-1)*pi / (n * max |Im lambda|).
FalsifyResult falsify_ep(const Matrix& A, const TimeGridSpec& grid = {},
                         double tol_base = kDefaultTolBase);

struct ClassifyOptions {
  double tol_base = kDefaultTolBase;
  TimeGridSpec grid;
  /// Skip the falsifier grid; verdicts then come from certificates and
  /// exact screens alone.
  bool certificates_only = false;
  /// Attach perturbation/power screen evidence to Undecided verdicts.
  bool attach_screen_evidence = true;
};

/// Full pipeline: exact small-n rule, spectrum screen, structural shapes
/// across a signature/negation family, symmetrizability, projection, block
/// reduction with recursion, eigenbasis minor products, then the grid
/// falsifier; anything left is Undecided with screen evidence attached.
EPVerdict classify_ep(const Matrix& A, const ClassifyOptions& options = {});

}  // namespace epmat
