#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epmat/index_set.hpp"
#include "epmat/types.hpp"

#include <random>

using epmat::IndexSet;

TEST_CASE("binomial exact values") {
  CHECK(epmat::binomial(0, 0) == 1);
  CHECK(epmat::binomial(4, 0) == 1);
  CHECK(epmat::binomial(3, 2) == 3);
  CHECK(epmat::binomial(5, 3) == 10);
  CHECK(epmat::binomial(10, 5) == 252);
  CHECK(epmat::binomial(16, 8) == 12870);
  CHECK(epmat::binomial(20, 10) == 184756);
  CHECK(epmat::binomial(3, 5) == 0);
  CHECK(epmat::binomial(-1, 0) == 0);
  CHECK(epmat::binomial(61, 30) == 232714896626891544LL);
  // the value itself fits, but the last multiplicative step does not
  CHECK_THROWS_AS(epmat::binomial(62, 31), epmat::CapacityError);
}

TEST_CASE("index set construction and validation") {
  IndexSet a(5, {1, 3});
  CHECK(a.size() == 2);
  CHECK(a.ambient() == 5);
  CHECK(a.element_sum() == 4);
  CHECK(a.contains(3));
  CHECK(!a.contains(2));
  CHECK(a.to_string() == "{1,3}");
  CHECK(IndexSet::empty(4).to_string() == "{}");
  CHECK(IndexSet::full(3) == IndexSet(3, {1, 2, 3}));

  CHECK_THROWS_AS(IndexSet(3, {2, 1}), epmat::DomainError);
  CHECK_THROWS_AS(IndexSet(3, {1, 1}), epmat::DomainError);
  CHECK_THROWS_AS(IndexSet(3, {0, 1}), epmat::DomainError);
  CHECK_THROWS_AS(IndexSet(3, {1, 4}), epmat::DomainError);
}

TEST_CASE("lexicographic enumeration") {
  auto q23 = epmat::enumerate_index_sets(2, 3);
  REQUIRE(q23.size() == 3);
  CHECK(q23[0] == IndexSet(3, {1, 2}));
  CHECK(q23[1] == IndexSet(3, {1, 3}));
  CHECK(q23[2] == IndexSet(3, {2, 3}));

  auto q35 = epmat::enumerate_index_sets(3, 5);
  REQUIRE(q35.size() == 10);
  CHECK(q35.front() == IndexSet(5, {1, 2, 3}));
  CHECK(q35.back() == IndexSet(5, {3, 4, 5}));

  auto q0 = epmat::enumerate_index_sets(0, 4);
  REQUIRE(q0.size() == 1);
  CHECK(q0[0].size() == 0);

  auto qnn = epmat::enumerate_index_sets(4, 4);
  REQUIRE(qnn.size() == 1);
  CHECK(qnn[0] == IndexSet::full(4));

  CHECK_THROWS_AS(epmat::enumerate_index_sets(12, 25), epmat::CapacityError);
  CHECK_THROWS_AS(epmat::enumerate_index_sets(-1, 3), epmat::DomainError);
  CHECK_THROWS_AS(epmat::enumerate_index_sets(4, 3), epmat::DomainError);
}

TEST_CASE("lex_rank matches enumeration order") {
  for (int n : {4, 6}) {
    for (int k = 0; k <= n; ++k) {
      auto sets = epmat::enumerate_index_sets(k, n);
      for (std::size_t i = 0; i < sets.size(); ++i) {
        CHECK(epmat::lex_rank(sets[i]) == static_cast<std::int64_t>(i));
      }
    }
  }
}

TEST_CASE("complement") {
  CHECK(epmat::complement(IndexSet(5, {1, 3})) == IndexSet(5, {2, 4, 5}));
  CHECK(epmat::complement(IndexSet::empty(3)) == IndexSet::full(3));
  CHECK(epmat::complement(IndexSet::full(3)) == IndexSet::empty(3));
}

TEST_CASE("signature sign values and symmetry") {
  CHECK(epmat::signature_sign(IndexSet(3, {1}), IndexSet(3, {1})) == 1);
  CHECK(epmat::signature_sign(IndexSet(3, {1}), IndexSet(3, {2})) == -1);
  CHECK(epmat::signature_sign(IndexSet(3, {1}), IndexSet(3, {3})) == 1);
  CHECK(epmat::signature_sign(IndexSet(3, {2}), IndexSet(3, {3})) == -1);
  CHECK(epmat::signature_sign(IndexSet(4, {1, 3}), IndexSet(4, {2, 4})) == 1);
  CHECK_THROWS_AS(epmat::signature_sign(IndexSet(3, {1}), IndexSet(3, {1, 2})),
                  epmat::DomainError);

  // s(alpha, beta) equals s on the complements
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 3 + static_cast<int>(rng() % 5);
    int k = 1 + static_cast<int>(rng() % n);
    auto sets = epmat::enumerate_index_sets(k, n);
    const auto& a = sets[rng() % sets.size()];
    const auto& b = sets[rng() % sets.size()];
    CHECK(epmat::signature_sign(a, b) ==
          epmat::signature_sign(epmat::complement(a), epmat::complement(b)));
  }
}
