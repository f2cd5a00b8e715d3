#include "epmat/consensus.hpp"

#include "epmat/expm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epmat {

void validate(const WeightedDigraph& g) {
  if (g.n < 1) throw DomainError("digraph: n must be at least 1");
  for (const Arc& a : g.arcs) {
    if (a.from < 1 || a.from > g.n || a.to < 1 || a.to > g.n) {
      throw DomainError("digraph: arc endpoint out of range");
    }
    if (a.from == a.to) {
      throw DomainError("digraph: self-loops are not allowed");
    }
    if (!std::isfinite(a.weight) || !(a.weight > 0.0)) {
      throw DomainError("digraph: arc weight must be positive and finite");
    }
  }
}

Matrix laplacian(const WeightedDigraph& g) {
  validate(g);
  Matrix L = Matrix::Zero(g.n, g.n);
  for (const Arc& a : g.arcs) {
    L(a.to - 1, a.from - 1) -= a.weight;
    L(a.to - 1, a.to - 1) += a.weight;
  }
  return L;
}

Matrix simulate(const Matrix& L, const Vector& x0,
                const std::vector<double>& grid) {
  require_square(L, "simulate");
  require_finite(L, "simulate");
  if (x0.size() != L.rows()) {
    throw DomainError("simulate: x0 length must match L");
  }
  const Matrix nL = -L;
  Matrix out(L.rows(), static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = expm(nL, grid[j]) * x0;
  }
  return out;
}

SignReversalAudit audit_sign_reversal(const Matrix& L, const Vector& x0,
                                      const std::vector<double>& grid) {
  require_square(L, "audit_sign_reversal");
  require_finite(L, "audit_sign_reversal");
  if (x0.size() != L.rows()) {
    throw DomainError("audit_sign_reversal: x0 length must match L");
  }

  SignReversalAudit audit;
  audit.x0 = x0;
  audit.grid = grid;
  const double amp = x0.lpNorm<Eigen::Infinity>();
  const double floor = 1e-12 * amp * amp;
  const Matrix nL = -L;
  for (double t : grid) {
    const Vector xt = expm(nL, t) * x0;
    int keep = 0;
    for (Eigen::Index i = 0; i < xt.size(); ++i) {
      if (xt(i) * x0(i) > floor) {
        keep = static_cast<int>(i) + 1;
        break;
      }
    }
    audit.preserved_index_trace.push_back(keep);
    if (keep == 0 && !audit.first_violation) {
      audit.first_violation = SignReversalViolation{
          t, (xt.array() * x0.array()).matrix()};
    }
  }
  return audit;
}

std::vector<SignReversalAudit> audit_sign_nonreversal(
    const Matrix& L, const std::vector<Vector>& x0s,
    const std::vector<double>& grid) {
  std::vector<SignReversalAudit> audits;
  audits.reserve(x0s.size());
  for (const Vector& x0 : x0s) {
    audits.push_back(audit_sign_reversal(L, x0, grid));
  }
  return audits;
}

PMReport is_pm_matrix(const Matrix& A, int k_max, double tol_base) {
  require_square(A, "is_pm_matrix");
  require_finite(A, "is_pm_matrix");
  if (k_max < 0) throw DomainError("is_pm_matrix: k_max must be >= 0");

  PMReport rep;
  Matrix P = Matrix::Identity(A.rows(), A.cols());
  for (int k = 0; k <= k_max; ++k) {
    const PVerdict v = is_p_matrix(P, tol_base);
    if (!v.is_p) {
      rep.is_pm = false;
      rep.failing_power = k;
      rep.failing_verdict = v;
      return rep;
    }
    if (k < k_max) P = P * A;
  }
  return rep;
}

std::optional<ReversalScenario> find_sign_reversal_scenario(
    const Matrix& L, const std::vector<double>& grid, int trials,
    unsigned seed, double tol_base) {
  require_square(L, "find_sign_reversal_scenario");
  require_finite(L, "find_sign_reversal_scenario");
  if (L.rows() > kMaxPrincipalMinorOrder) {
    throw CapacityError("find_sign_reversal_scenario: n > 16");
  }

  const Matrix nL = -L;
  double best = std::numeric_limits<double>::infinity();
  double best_t = std::numeric_limits<double>::quiet_NaN();
  for (double t : grid) {
    if (!(t > 0.0)) continue;
    const Matrix E = expm(nL, t);
    const PVerdict v = is_p_matrix(E, tol_base);
    if (v.min_principal_minor < best) {
      best = v.min_principal_minor;
      best_t = t;
    }
  }
  if (!std::isfinite(best_t)) return std::nullopt;

  const Matrix E = expm(nL, best_t);
  const auto w = sign_reversal_search(E, trials, seed);
  if (!w) return std::nullopt;
  return ReversalScenario{w->x, best_t, *w};
}

}  // namespace epmat
