#include <catch2/catch_amalgamated.hpp>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "test_helpers.hpp"

using namespace stomp;
using test_helpers::random_sparse_stochastic;

TEST_CASE("pattern_of applies the positivity threshold") {
  const auto diag = pattern_of(StochasticMatrix::identity(3));
  CHECK(diag == ZeroPattern::identity(3));

  Rng rng(1);
  const auto dense = test_helpers::random_stochastic(4, rng);
  CHECK(pattern_of(dense) == ZeroPattern::full(4));

  // An entry at eps_pos / 2 is zero for pattern purposes.
  const auto edge = StochasticMatrix::from_rows(
      {{0.5, 0.5}, {kEpsPos / 2, 1.0 - kEpsPos / 2}});
  const auto p = pattern_of(edge);
  CHECK(p.test(0, 0));
  CHECK(p.test(0, 1));
  CHECK_FALSE(p.test(1, 0));
  CHECK(p.test(1, 1));
}

TEST_CASE("pattern_product basics") {
  Rng rng(2);
  const auto q = test_helpers::random_posdiag_pattern(5, rng);
  CHECK(pattern_product(ZeroPattern::identity(5), q) == q);
  CHECK(pattern_product(q, ZeroPattern::identity(5)) == q);
  CHECK(pattern_product(ZeroPattern::full(5), ZeroPattern::full(5)) ==
        ZeroPattern::full(5));
  CHECK_THROWS_AS(pattern_product(ZeroPattern::full(2), ZeroPattern::full(3)),
                  std::invalid_argument);
}

TEST_CASE("positive-diagonal pattern products absorb both factors") {
  // Exhaustive over all 2x2 patterns with full diagonals (4 x 4 choices
  // of the two off-diagonal bits).
  for (unsigned pa = 0; pa < 4; ++pa) {
    for (unsigned pb = 0; pb < 4; ++pb) {
      ZeroPattern a = ZeroPattern::identity(2);
      ZeroPattern b = ZeroPattern::identity(2);
      if (pa & 1) a.set(0, 1);
      if (pa & 2) a.set(1, 0);
      if (pb & 1) b.set(0, 1);
      if (pb & 2) b.set(1, 0);
      const auto prod = pattern_product(a, b);
      CHECK(prod.contains(a.united(b)));
    }
  }
}

TEST_CASE("pattern product is sound for threshold-safe matrices") {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto a = random_sparse_stochastic(n, rng, rng.uniform(0.2, 0.9));
    const auto b = random_sparse_stochastic(n, rng, rng.uniform(0.2, 0.9));
    CHECK(pattern_of(multiply(a, b)) ==
          pattern_product(pattern_of(a), pattern_of(b)));
  }
}

TEST_CASE("pattern utilities") {
  ZeroPattern p(70);  // two words per row
  p.set(0, 69);
  p.set(69, 0);
  CHECK(p.test(0, 69));
  CHECK(p.transposed().test(69, 0));
  CHECK(p.transposed().transposed() == p);
  CHECK(p.count() == 2);
  CHECK_FALSE(p.diagonal_all_set());
  CHECK(ZeroPattern::full(70).all_set());
  CHECK(ZeroPattern::full(70).contains(p));
  CHECK_FALSE(p.contains(ZeroPattern::full(70)));
  CHECK(ZeroPattern::identity(70).diagonal_all_set());
}
