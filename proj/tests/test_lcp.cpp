#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epmat/lcp.hpp"
#include "epmat/pclass.hpp"

#include "support/matrices.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace epmat;

TEST_CASE("identity instance with strictly negative q has the obvious solution") {
  LCPInstance inst;
  inst.M = Matrix::Identity(2, 2);
  inst.q = Vector(2);
  inst.q << -1, -2;
  const LCPResult r = solve_enumerate(inst);
  CHECK(r.bases_examined == 4);
  CHECK_FALSE(r.degenerate_family);
  REQUIRE(r.solutions.size() == 1);
  const LCPSolution& s = r.solutions[0];
  CHECK(s.z(0) == doctest::Approx(1.0));
  CHECK(s.z(1) == doctest::Approx(2.0));
  CHECK(s.w.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.support.to_string() == "{1,2}");
  CHECK_FALSE(s.degenerate);
}

TEST_CASE("nonnegative q solves with z = 0") {
  LCPInstance inst;
  inst.M = Matrix::Identity(2, 2);
  inst.q = Vector(2);
  inst.q << 1, 2;
  const LCPResult r = solve_enumerate(inst);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.solutions[0].z.cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(r.solutions[0].support.size() == 0);
  CHECK(r.solutions[0].w(1) == doctest::Approx(2.0));
}

TEST_CASE("a negative definite scalar admits two solutions") {
  LCPInstance inst;
  inst.M = Matrix(1, 1);
  inst.M << -1;
  inst.q = Vector(1);
  inst.q << 1;
  const LCPResult r = solve_enumerate(inst);
  REQUIRE(r.solutions.size() == 2);
  // One at z = 0 and one at z = 1; enumeration order puts z = 0 first.
  CHECK(r.solutions[0].z(0) == doctest::Approx(0.0));
  CHECK(r.solutions[1].z(0) == doctest::Approx(1.0));
  CHECK(r.solutions[1].w(0) == doctest::Approx(0.0));
}

TEST_CASE("touching boundary marks the solution degenerate") {
  LCPInstance inst;
  inst.M = Matrix::Identity(2, 2);
  inst.q = Vector(2);
  inst.q << 0, -1;
  const LCPResult r = solve_enumerate(inst);
  REQUIRE(r.solutions.size() == 1);
  CHECK(r.solutions[0].degenerate);
  CHECK(r.solutions[0].z(1) == doctest::Approx(1.0));
}

TEST_CASE("solutions satisfy the complementarity conditions on random instances") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    LCPInstance inst;
    inst.M = oracle::random_matrix(rng, n);
    inst.q = oracle::random_vector(rng, n);
    const LCPResult r = solve_enumerate(inst);
    CHECK(r.bases_examined == (1L << n));
    for (const LCPSolution& s : r.solutions) {
      CHECK(s.z.minCoeff() >= -1e-8);
      CHECK(s.w.minCoeff() >= -1e-8);
      CHECK((s.w - (inst.q + inst.M * s.z)).cwiseAbs().maxCoeff() <= 1e-9);
      double comp = 0.0;
      for (int i = 0; i < n; ++i) {
        comp = std::max(comp, std::abs(s.z(i) * s.w(i)));
      }
      CHECK(comp <= 1e-6 * (1.0 + s.z.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("P-matrices land every sampled q at exactly one solution") {
  std::mt19937_64 rng(42);
  const Matrix M = oracle::random_p_matrix(rng, 3);
  REQUIRE(is_p_matrix(M).is_p);
  const CrosscheckReport rep = uniqueness_crosscheck(M, 200, 7);
  CHECK(rep.trials == 200);
  CHECK(rep.all_unique_nondegenerate);
  REQUIRE(rep.multiplicity_counts.size() >= 2);
  CHECK(rep.multiplicity_counts[1] == 200);
  CHECK(rep.multiplicity_counts[0] == 0);
  CHECK(rep.degenerate_trials == 0);
}

TEST_CASE("a non-P matrix shows zero or two solutions, never one") {
  Matrix M(1, 1);
  M << -1;
  const CrosscheckReport rep = uniqueness_crosscheck(M, 300, 11);
  CHECK_FALSE(rep.all_unique_nondegenerate);
  REQUIRE(rep.multiplicity_counts.size() >= 3);
  CHECK(rep.multiplicity_counts[1] == 0);
  CHECK(rep.multiplicity_counts[0] > 0);
  CHECK(rep.multiplicity_counts[2] > 0);
  CHECK(rep.multiplicity_counts[0] + rep.multiplicity_counts[2] == 300);
}

TEST_CASE("shape and capacity errors") {
  LCPInstance inst;
  inst.M = Matrix::Identity(2, 2);
  inst.q = Vector::Ones(3);
  CHECK_THROWS_AS(solve_enumerate(inst), DomainError);

  LCPInstance big;
  big.M = Matrix::Identity(13, 13);
  big.q = Vector::Ones(13);
  CHECK_THROWS_AS(solve_enumerate(big), CapacityError);
  CHECK_THROWS_AS(uniqueness_crosscheck(Matrix::Identity(13, 13), 5),
                  CapacityError);
}
