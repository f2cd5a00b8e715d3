#pragma once

#include "epmat/index_set.hpp"
#include "epmat/pclass.hpp"
#include "epmat/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epmat {

/// Weighted arc from -> to, 1-based endpoints, weight > 0. An arc j -> i
/// means agent i listens to agent j.
struct Arc {
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

struct WeightedDigraph {
  int n = 0;
  std::vector<Arc> arcs;
};

/// Throws DomainError on out-of-range endpoints, self-loops, nonpositive
/// or non-finite weights.
void validate(const WeightedDigraph& g);

/// In-degree Laplacian: L(i,j) = -w(j -> i) for i != j and row sums zero,
/// so the dynamics x' = -L x averages each agent toward its in-neighbors.
Matrix laplacian(const WeightedDigraph& g);

/// Columns are exp(-L t) x0 over the grid times.
Matrix simulate(const Matrix& L, const Vector& x0,
                const std::vector<double>& grid);

struct SignReversalViolation {
  double t = 0.0;
  /// Entrywise x_i(t) * x_i(0).
  Vector products;
};

struct SignReversalAudit {
  Vector x0;
  std::vector<double> grid;
  /// First grid time where no coordinate keeps the sign of its initial
  /// value; absent when the trajectory stays sign-preserving on the grid.
  std::optional<SignReversalViolation> first_violation;
  /// For each grid time, a coordinate index (1-based) witnessing
  /// preservation, or 0 at a violation.
  std::vector<int> preserved_index_trace;
};

/// Audits x(t) = exp(-L t) x0 along the grid. A time passes when some
/// coordinate satisfies x_i(t) x_i(0) > floor, with the floor scaled to
/// the square of the initial amplitude; zero initial entries never count
/// as preserving.
SignReversalAudit audit_sign_reversal(const Matrix& L, const Vector& x0,
                                      const std::vector<double>& grid);

std::vector<SignReversalAudit> audit_sign_nonreversal(
    const Matrix& L, const std::vector<Vector>& x0s,
    const std::vector<double>& grid);

struct PMReport {
  bool is_pm = true;
  /// Lowest power whose principal-minor test fails, when one does.
  std::optional<int> failing_power;
  std::optional<PVerdict> failing_verdict;
};

/// Checks that A^0, A^1, ..., A^{k_max} all have every principal minor
/// positive.
PMReport is_pm_matrix(const Matrix& A, int k_max,
                      double tol_base = kDefaultTolBase);

struct ReversalScenario {
  Vector x0;
  double t = 0.0;
  SignReversalWitness witness;
};

/// Hunts for an initial condition whose trajectory reverses sign: scans
/// the grid for the time where exp(-L t) is most nearly outside the
/// P class, then runs the randomized sign-reversal search there.
std::optional<ReversalScenario> find_sign_reversal_scenario(
    const Matrix& L, const std::vector<double>& grid, int trials = 2000,
    unsigned seed = 0, double tol_base = kDefaultTolBase);

}  // namespace epmat
