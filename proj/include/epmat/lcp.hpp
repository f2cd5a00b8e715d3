#pragma once

#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <optional>
#include <vector>

namespace epmat {

inline constexpr int kMaxLcpOrder = 12;

struct LCPInstance {
  Matrix M;
  Vector q;
};

/// One complementary solution: z >= 0, w = q + M z >= 0, z . w = 0.
/// support lists the coordinates carried by z; degenerate marks a
/// coordinate where both z_i and w_i vanish, so the supporting basis is
/// not unique.
struct LCPSolution {
  Vector z;
  Vector w;
  IndexSet support;
  bool degenerate = false;
};

struct LCPResult {
  std::vector<LCPSolution> solutions;
  /// A singular but consistent basis admits a continuum of solutions; one
  /// representative is kept and this flag is raised.
  bool degenerate_family = false;
  long bases_examined = 0;
};

/// Enumerates all 2^n complementary bases of (q, M). Exact up to the
/// linear solves; requires n <= 12.
LCPResult solve_enumerate(const LCPInstance& inst,
                          double tol = kDefaultTolBase);

struct CrosscheckReport {
  int trials = 0;
  /// multiplicity_counts[m] = number of sampled q with exactly m solutions;
  /// index 0 collects the no-solution samples.
  std::vector<int> multiplicity_counts;
  int degenerate_trials = 0;
  bool all_unique_nondegenerate = true;
};

/// Samples standard-normal q vectors and tabulates how many complementary
/// solutions each instance has. A matrix with every principal minor
/// positive must land every mass at multiplicity one.
CrosscheckReport uniqueness_crosscheck(const Matrix& M, int trials,
                                       unsigned seed = 0,
                                       double tol = kDefaultTolBase);

}  // namespace epmat
