#pragma once

#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <vector>

namespace epmat {

enum class CompoundKind { multiplicative, additive };

/// Matrix of all order-k minors of an n-by-n source, rows and columns labeled
/// by Q^{k,n} in lexicographic order. kind=additive holds the first-order
/// coefficient of (I + eps*A)^(k) instead of the minors themselves.
struct CompoundMatrix {
  int source_n = 0;
  int k = 0;
  CompoundKind kind = CompoundKind::multiplicative;
  Matrix data;

  /// Row/column labels, regenerated on demand.
  std::vector<IndexSet> index_sets() const {
    return enumerate_index_sets(k, source_n);
  }
};

/// A^(k): entry (rank(alpha), rank(beta)) = minor A(alpha|beta).
/// A^(1) = A and A^(n) = det(A) as a 1x1 matrix.
CompoundMatrix mult_compound(const Matrix& A, int k);

/// A^[k]: first-order coefficient of (I + eps*A)^(k), evaluated with
/// truncated first-order arithmetic through the minor kernel.
/// A^[1] = A and A^[n] = trace(A) as a 1x1 matrix.
CompoundMatrix add_compound(const Matrix& A, int k);

/// Max-abs deviation between (expm(A*t))^(k) and expm(A^[k]*t). Self-test
/// quantity, not a verdict.
double exp_compound_identity_check(const Matrix& A, int k, double t);

}  // namespace epmat
