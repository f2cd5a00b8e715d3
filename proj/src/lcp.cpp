#include "epmat/lcp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace epmat {

LCPResult solve_enumerate(const LCPInstance& inst, double tol) {
  const Matrix& M = inst.M;
  require_square(M, "solve_enumerate");
  require_finite(M, "solve_enumerate");
  const int n = static_cast<int>(M.rows());
  if (inst.q.size() != n) {
    throw DomainError("solve_enumerate: q length must match M");
  }
  if (!inst.q.allFinite()) {
    throw DomainError("solve_enumerate: q has non-finite entries");
  }
  if (n > kMaxLcpOrder) {
    throw CapacityError("solve_enumerate: n > 12 means more than 4096 "
                        "complementary bases");
  }

  const Vector& q = inst.q;
  const double scale =
      std::max({1.0, M.cwiseAbs().maxCoeff(), q.cwiseAbs().maxCoeff()});
  const double accept = tol * scale;

  LCPResult res;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    ++res.bases_examined;
    std::vector<int> sup;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1) sup.push_back(i);
    }
    const int k = static_cast<int>(sup.size());

    Vector z = Vector::Zero(n);
    if (k > 0) {
      Matrix Ma(k, k);
      Vector qa(k);
      for (int r = 0; r < k; ++r) {
        qa(r) = q(sup[r]);
        for (int c = 0; c < k; ++c) Ma(r, c) = M(sup[r], sup[c]);
      }
      Eigen::FullPivLU<Matrix> lu(Ma);
      if (!lu.isInvertible()) {
        Matrix aug(k, k + 1);
        aug.leftCols(k) = Ma;
        aug.col(k) = -qa;
        Eigen::FullPivLU<Matrix> lu_aug(aug);
        if (lu_aug.rank() == lu.rank()) res.degenerate_family = true;
        continue;
      }
      const Vector za = lu.solve(-qa);
      if (za.minCoeff() < -accept) continue;
      for (int r = 0; r < k; ++r) z(sup[r]) = std::max(0.0, za(r));
    }

    const Vector w = q + M * z;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      if (!((mask >> i) & 1) && w(i) < -accept) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    bool dup = false;
    for (const LCPSolution& s : res.solutions) {
      if ((s.z - z).lpNorm<Eigen::Infinity>() <=
          1e-7 * (1.0 + z.lpNorm<Eigen::Infinity>())) {
        dup = true;
        break;
      }
    }
    if (dup) continue;

    bool degen = false;
    for (int i = 0; i < n; ++i) {
      if (std::abs(z(i)) <= accept && std::abs(w(i)) <= accept) {
        degen = true;
        break;
      }
    }
    std::vector<int> sup1;
    for (int i : sup) sup1.push_back(i + 1);
    res.solutions.push_back(LCPSolution{z, w, IndexSet(n, sup1), degen});
  }
  return res;
}

CrosscheckReport uniqueness_crosscheck(const Matrix& M, int trials,
                                       unsigned seed, double tol) {
  require_square(M, "uniqueness_crosscheck");
  require_finite(M, "uniqueness_crosscheck");
  if (M.rows() > kMaxLcpOrder) {
    throw CapacityError("uniqueness_crosscheck: n > 12");
  }
  const int n = static_cast<int>(M.rows());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CrosscheckReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Vector q(n);
    for (int i = 0; i < n; ++i) q(i) = gauss(rng);
    const LCPResult r = solve_enumerate(LCPInstance{M, q}, tol);
    const std::size_t m = r.solutions.size();
    if (rep.multiplicity_counts.size() <= m) {
      rep.multiplicity_counts.resize(m + 1, 0);
    }
    ++rep.multiplicity_counts[m];
    bool degen = r.degenerate_family;
    for (const LCPSolution& s : r.solutions) degen = degen || s.degenerate;
    if (degen) ++rep.degenerate_trials;
    if (m != 1 || degen) rep.all_unique_nondegenerate = false;
  }
  return rep;
}

}  // namespace epmat
