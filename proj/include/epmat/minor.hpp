#pragma once

#include "epmat/dual.hpp"
#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <cmath>
#include <type_traits>
#include <utility>
#include <vector>

namespace epmat {

/// Copy of A[rows|cols] as a dense block.
Matrix submatrix(const Matrix& A, const IndexSet& rows, const IndexSet& cols);

namespace detail {

template <typename Scalar>
constexpr double pivot_magnitude(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Dual>) {
    return x.a < 0 ? -x.a : x.a;
  } else {
    return x < 0 ? -x : x;
  }
}

/// Determinant of the k-by-k row-major buffer by Gaussian elimination.
///
/// double: partial pivoting on magnitude. Orders k <= 3 take the cofactor
/// closed forms (exact on small-integer input, which the reporting paths
/// rely on).
///
/// Dual: full pivoting on the constant term. Once no pivot with a nonzero
/// constant term remains, a leftover block of size >= 2 makes every
/// determinant term second order, hence zero after truncation; a leftover
/// 1x1 block multiplies in directly.
template <typename Scalar>
Scalar det_inplace(std::vector<Scalar>& m, int k) {
  constexpr bool dual = std::is_same_v<Scalar, Dual>;
  auto at = [&m, k](int r, int c) -> Scalar& { return m[r * k + c]; };
  if (k == 0) return Scalar(1);
  if (k == 1) return at(0, 0);
  if (k == 2) return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
  if (k == 3) {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }

  Scalar det = Scalar(1);
  int sign = 1;
  for (int col = 0; col < k; ++col) {
    int pr = -1, pc = col;
    double best = 0.0;
    if constexpr (dual) {
      for (int r = col; r < k; ++r) {
        for (int c = col; c < k; ++c) {
          double mag = pivot_magnitude(at(r, c));
          if (mag > best) {
            best = mag;
            pr = r;
            pc = c;
          }
        }
      }
      if (pr < 0) {
        int rem = k - col;
        if (rem == 1) return det * Scalar(sign) * at(col, col);
        return Scalar(0);
      }
    } else {
      for (int r = col; r < k; ++r) {
        double mag = pivot_magnitude(at(r, col));
        if (mag > best) {
          best = mag;
          pr = r;
        }
      }
      if (pr < 0) return Scalar(0);
    }
    if (pr != col) {
      for (int c = 0; c < k; ++c) std::swap(at(pr, c), at(col, c));
      sign = -sign;
    }
    if (pc != col) {
      for (int r = 0; r < k; ++r) std::swap(at(r, pc), at(r, col));
      sign = -sign;
    }
    det = det * at(col, col);
    for (int r = col + 1; r < k; ++r) {
      Scalar f = at(r, col) / at(col, col);
      for (int c = col + 1; c < k; ++c) {
        at(r, c) = at(r, c) - f * at(col, c);
      }
    }
  }
  return sign < 0 ? -det : det;
}

}  // namespace detail

/// Minor A(rows|cols): determinant of the selected square submatrix.
/// The order-0 minor is 1.
double minor_of(const Matrix& A, const IndexSet& rows, const IndexSet& cols);

/// Effective positivity threshold for the minor at (rows, cols):
/// tol_base * max(1, maxabs(A[rows|cols])^k).
double minor_tolerance(double tol_base, const Matrix& A, const IndexSet& rows,
                       const IndexSet& cols);

/// First-order coefficient of the minor of I + eps*A at (rows, cols).
double first_order_minor(const Matrix& A, const IndexSet& rows,
                         const IndexSet& cols);

/// Rounding-error floor for a computed minor: 8 * k * u * prod(row norms)
/// of the submatrix (Hadamard-style bound). Values inside the floor carry
/// no trustworthy sign.
double minor_error_floor(const Matrix& A, const IndexSet& rows,
                         const IndexSet& cols);

}  // namespace epmat
