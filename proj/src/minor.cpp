#include "epmat/minor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epmat {

namespace {

void require_selectable(const Matrix& A, const IndexSet& rows,
                        const IndexSet& cols) {
  if (rows.ambient() != A.rows() || cols.ambient() != A.cols()) {
    throw DomainError("minor: index-set ambient does not match matrix shape");
  }
  if (rows.size() != cols.size()) {
    throw DomainError("minor: row and column selections differ in size");
  }
}

}  // namespace

Matrix submatrix(const Matrix& A, const IndexSet& rows, const IndexSet& cols) {
  if (rows.ambient() != A.rows() || cols.ambient() != A.cols()) {
    throw DomainError("submatrix: index-set ambient does not match matrix shape");
  }
  Matrix B(rows.size(), cols.size());
  for (int r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < cols.size(); ++c) {
      B(r, c) = A(rows.elems()[r] - 1, cols.elems()[c] - 1);
    }
  }
  return B;
}

double minor_of(const Matrix& A, const IndexSet& rows, const IndexSet& cols) {
  require_selectable(A, rows, cols);
  const int k = rows.size();
  if (k == 0) return 1.0;
  std::vector<double> buf(static_cast<std::size_t>(k) * k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      buf[r * k + c] = A(rows.elems()[r] - 1, cols.elems()[c] - 1);
    }
  }
  return detail::det_inplace(buf, k);
}

double minor_tolerance(double tol_base, const Matrix& A, const IndexSet& rows,
                       const IndexSet& cols) {
  require_selectable(A, rows, cols);
  const int k = rows.size();
  double maxabs = 0.0;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      maxabs = std::max(maxabs,
                        std::abs(A(rows.elems()[r] - 1, cols.elems()[c] - 1)));
    }
  }
  return tol_base * std::max(1.0, std::pow(maxabs, k));
}

double first_order_minor(const Matrix& A, const IndexSet& rows,
                         const IndexSet& cols) {
  require_selectable(A, rows, cols);
  const int k = rows.size();
  if (k == 0) return 0.0;
  std::vector<Dual> buf(static_cast<std::size_t>(k) * k);
  for (int r = 0; r < k; ++r) {
    int i = rows.elems()[r];
    for (int c = 0; c < k; ++c) {
      int j = cols.elems()[c];
      buf[r * k + c] = Dual(i == j ? 1.0 : 0.0, A(i - 1, j - 1));
    }
  }
  return detail::det_inplace(buf, k).b;
}

double minor_error_floor(const Matrix& A, const IndexSet& rows,
                         const IndexSet& cols) {
  require_selectable(A, rows, cols);
  const int k = rows.size();
  if (k == 0) return 0.0;
  double prod = 1.0;
  for (int r = 0; r < k; ++r) {
    double s = 0.0;
    for (int c = 0; c < k; ++c) {
      double v = A(rows.elems()[r] - 1, cols.elems()[c] - 1);
      s += v * v;
    }
    prod *= std::sqrt(s);
  }
  return 8.0 * k * std::numeric_limits<double>::epsilon() * prod;
}

}  // namespace epmat
