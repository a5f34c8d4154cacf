#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "test_helpers.hpp"

using namespace stomp;
using test_helpers::random_consensus_matrix;
using test_helpers::random_sparse_stochastic;
using test_helpers::random_stochastic;

TEST_CASE("StochasticMatrix validates its invariants") {
  CHECK_THROWS_AS(StochasticMatrix(0, {}), std::invalid_argument);
  CHECK_THROWS_AS(StochasticMatrix(2, {1.0, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(StochasticMatrix::from_rows({{0.5, 0.6}, {0.5, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(StochasticMatrix::from_rows({{1.5, -0.5}, {0.5, 0.5}}),
                  std::invalid_argument);
  const auto a = StochasticMatrix::from_rows({{0.5, 0.5}, {0.25, 0.75}});
  CHECK(a.size() == 2);
  CHECK(a(1, 0) == 0.25);
  CHECK(a.has_positive_diagonal());
  CHECK_FALSE(
      StochasticMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}).has_positive_diagonal());
}

TEST_CASE("multiply matches hand-computed products") {
  const auto i2 = StochasticMatrix::identity(2);
  const auto b = StochasticMatrix::from_rows({{0.3, 0.7}, {0.9, 0.1}});
  CHECK(multiply(i2, b) == b);

  const auto k = StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(multiply(i2, k) == k);

  // [[0.5,0.5],[0,1]] * [[1,0],[0.5,0.5]] = [[0.75,0.25],[0.5,0.5]]
  const auto p = multiply(StochasticMatrix::from_rows({{0.5, 0.5}, {0.0, 1.0}}),
                          StochasticMatrix::from_rows({{1.0, 0.0}, {0.5, 0.5}}));
  CHECK(p(0, 0) == Catch::Approx(0.75).margin(1e-15));
  CHECK(p(0, 1) == Catch::Approx(0.25).margin(1e-15));
  CHECK(p(1, 0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(p(1, 1) == Catch::Approx(0.5).margin(1e-15));

  CHECK_THROWS_AS(multiply(i2, StochasticMatrix::identity(3)),
                  std::invalid_argument);
}

TEST_CASE("ergodicity coefficient on the defining examples") {
  CHECK(ergodicity_coefficient(
            StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})) == 0.0);
  CHECK(ergodicity_coefficient(StochasticMatrix::identity(2)) == 1.0);
  // 1 - (min(.8,.3) + min(.2,.7)) = 1 - 0.5
  CHECK(ergodicity_coefficient(StochasticMatrix::from_rows(
            {{0.8, 0.2}, {0.3, 0.7}})) == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("tau is zero exactly on equal rows and only there") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto k = random_consensus_matrix(n, rng);
    CHECK(ergodicity_coefficient(k) == 0.0);
    CHECK(is_consensus_matrix(k));

    const auto a = random_stochastic(n, rng);
    const double tau = ergodicity_coefficient(a);
    CHECK((tau == 0.0) == is_consensus_matrix(a));
  }
}

TEST_CASE("tau is submultiplicative") {
  Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto a = random_sparse_stochastic(n, rng, rng.uniform(0.2, 1.0));
    const auto b = random_sparse_stochastic(n, rng, rng.uniform(0.2, 1.0));
    const double lhs = ergodicity_coefficient(multiply(a, b));
    const double rhs =
        ergodicity_coefficient(a) * ergodicity_coefficient(b);
    CHECK(lhs <= rhs + 1e-12);
    CHECK(lhs >= 0.0);
    CHECK(lhs <= 1.0);
  }
}

TEST_CASE("min_plus on the defining examples") {
  CHECK(min_plus(StochasticMatrix::identity(3)) == 1.0);
  const double third = 1.0 / 3.0;
  CHECK(min_plus(StochasticMatrix::from_rows({{third, third, third},
                                              {third, third, third},
                                              {third, third, third}})) ==
        third);
  CHECK(min_plus(StochasticMatrix::from_rows({{0.9, 0.1}, {0.0, 1.0}})) == 0.1);
}

TEST_CASE("positive minimum is supermultiplicative") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto a = random_sparse_stochastic(n, rng, rng.uniform(0.3, 1.0));
    const auto b = random_sparse_stochastic(n, rng, rng.uniform(0.3, 1.0));
    CHECK(min_plus(multiply(a, b)) >= min_plus(a) * min_plus(b) - 1e-12);
  }
}

TEST_CASE("block row-sum norm") {
  const auto a = StochasticMatrix::from_rows({{1.0, 0.0}, {0.5, 0.5}});
  CHECK(block_row_sum_norm(a, {0, 1}, {0, 1}) == 1.0);
  CHECK(block_row_sum_norm(a, {1}, {1}) == 0.5);
  CHECK(block_row_sum_norm(StochasticMatrix::identity(2), {0}, {1}) == 0.0);
  CHECK_THROWS_AS(block_row_sum_norm(a, {}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(block_row_sum_norm(a, {0}, {7}), std::out_of_range);
}

TEST_CASE("column extrema") {
  const auto k = StochasticMatrix::from_rows({{0.4, 0.6}, {0.4, 0.6}});
  for (const auto& [lo, hi] : column_extrema(k)) CHECK(lo == hi);

  const auto e = column_extrema(StochasticMatrix::identity(2));
  CHECK(e[0] == std::pair{0.0, 1.0});
  CHECK(e[1] == std::pair{0.0, 1.0});

  const auto x = column_extrema(
      StochasticMatrix::from_rows({{0.8, 0.2}, {0.3, 0.7}}));
  CHECK(x[0] == std::pair{0.3, 0.8});
  CHECK(x[1] == std::pair{0.2, 0.7});
}

TEST_CASE("column minima rise and maxima fall under left multiplication") {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    const auto a = random_stochastic(n, rng);
    const auto b = random_stochastic(n, rng);
    const auto before = column_extrema(b);
    const auto after = column_extrema(multiply(a, b));
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(after[j].first >= before[j].first - 1e-12);
      CHECK(after[j].second <= before[j].second + 1e-12);
    }
  }
}

TEST_CASE("restrict_to rejects leaking index sets") {
  const auto a = StochasticMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
  CHECK_THROWS_AS(restrict_to(a, {1, 2}), std::invalid_argument);
  const auto sub = restrict_to(a, {0});
  CHECK(sub.size() == 1);
  CHECK(sub(0, 0) == 1.0);
}

TEST_CASE("permuted applies simultaneous row and column permutations") {
  const auto a = StochasticMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
  const auto b = permuted(a, {2, 1, 0});
  CHECK(b(0, 0) == 0.5);
  CHECK(b(0, 2) == 0.2);
  CHECK(b(2, 2) == 1.0);
  CHECK_THROWS_AS(permuted(a, {0, 0, 1}), std::invalid_argument);
}
