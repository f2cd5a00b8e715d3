#pragma once

namespace epmat {

/// First-order truncated polynomial a + b*eps with eps^2 = 0.
/// Supports the ring operations plus division by elements whose constant
/// term is nonzero, which is all Gaussian elimination needs.
struct Dual {
  double a = 0.0;  // constant term
  double b = 0.0;  // first-order coefficient

  constexpr Dual() = default;
  constexpr Dual(double value) : a(value) {}
  constexpr Dual(double value, double slope) : a(value), b(slope) {}
};

constexpr Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.b + y.b}; }
constexpr Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.b - y.b}; }
constexpr Dual operator-(Dual x) { return {-x.a, -x.b}; }
constexpr Dual operator*(Dual x, Dual y) {
  return {x.a * y.a, x.a * y.b + x.b * y.a};
}
constexpr Dual operator/(Dual x, Dual y) {
  // valid only for y.a != 0; elimination pivots guarantee this
  return {x.a / y.a, (x.b * y.a - x.a * y.b) / (y.a * y.a)};
}

}  // namespace epmat
