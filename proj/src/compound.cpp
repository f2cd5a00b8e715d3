#include "epmat/compound.hpp"

#include "epmat/expm.hpp"
#include "epmat/minor.hpp"

#include <string>

namespace epmat {

namespace {

std::vector<IndexSet> checked_sets(const Matrix& A, int k, const char* what) {
  require_square(A, what);
  require_finite(A, what);
  const int n = static_cast<int>(A.rows());
  if (k < 1 || k > n) {
    throw DomainError(std::string(what) + ": order must satisfy 1 <= k <= n");
  }
  return enumerate_index_sets(k, n);
}

}  // namespace

CompoundMatrix mult_compound(const Matrix& A, int k) {
  const auto sets = checked_sets(A, k, "mult_compound");
  const auto C = static_cast<Eigen::Index>(sets.size());

  CompoundMatrix out;
  out.source_n = static_cast<int>(A.rows());
  out.k = k;
  out.kind = CompoundKind::multiplicative;
  out.data.resize(C, C);
  for (Eigen::Index r = 0; r < C; ++r) {
    for (Eigen::Index c = 0; c < C; ++c) {
      out.data(r, c) = minor_of(A, sets[r], sets[c]);
    }
  }
  return out;
}

CompoundMatrix add_compound(const Matrix& A, int k) {
  const auto sets = checked_sets(A, k, "add_compound");
  const auto C = static_cast<Eigen::Index>(sets.size());

  CompoundMatrix out;
  out.source_n = static_cast<int>(A.rows());
  out.k = k;
  out.kind = CompoundKind::additive;
  out.data.resize(C, C);
  for (Eigen::Index r = 0; r < C; ++r) {
    for (Eigen::Index c = 0; c < C; ++c) {
      out.data(r, c) = first_order_minor(A, sets[r], sets[c]);
    }
  }
  return out;
}

double exp_compound_identity_check(const Matrix& A, int k, double t) {
  const Matrix lhs = mult_compound(expm(A, t), k).data;
  const Matrix rhs = expm(add_compound(A, k).data, t);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace epmat
