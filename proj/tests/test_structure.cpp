#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/structure.hpp"
#include "test_helpers.hpp"

using namespace stomp;
using test_helpers::random_posdiag_pattern;
using test_helpers::transitive_closure;

namespace {

// Reference partition from the reachability closure: classes are the
// mutual-reachability equivalence classes; a class is essential iff no
// member reaches outside the class.
struct OraclePartition {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<bool> essential;
  std::vector<std::size_t> class_of;
};

OraclePartition oracle_partition(const ZeroPattern& p) {
  const auto reach = transitive_closure(p);
  const std::size_t n = p.size();
  OraclePartition out;
  out.class_of.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.class_of[i] != n) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) cls.push_back(j);
    }
    const std::size_t id = out.classes.size();
    for (std::size_t j : cls) out.class_of[j] = id;
    bool essential = true;
    for (std::size_t j : cls) {
      for (std::size_t k = 0; k < n; ++k) {
        if (reach[j][k] && !reach[k][j]) essential = false;
      }
    }
    out.classes.push_back(std::move(cls));
    out.essential.push_back(essential);
  }
  return out;
}

}  // namespace

TEST_CASE("communication classes on the canonical examples") {
  const auto full = communication_classes(ZeroPattern::full(4));
  CHECK(full.classes.size() == 1);
  CHECK(full.essential_count == 1);
  CHECK(full.classes[0] == std::vector<std::size_t>{0, 1, 2, 3});

  const auto diag = communication_classes(ZeroPattern::identity(3));
  CHECK(diag.classes.size() == 3);
  CHECK(diag.essential_count == 3);

  // [[1,0,0],[.5,.5,0],[.2,.3,.5]]: 1 is essential, 2 and 3 inessential.
  const auto a = StochasticMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
  const auto part = communication_classes(pattern_of(a));
  REQUIRE(part.classes.size() == 3);
  CHECK(part.essential_count == 1);
  CHECK(part.classes[0] == std::vector<std::size_t>{0});
  CHECK(part.classes[1] == std::vector<std::size_t>{1});
  CHECK(part.classes[2] == std::vector<std::size_t>{2});
  CHECK(is_essential_index(part, 0));
  CHECK_FALSE(is_essential_index(part, 2));
  CHECK_THROWS_AS(is_essential_index(part, 5), std::out_of_range);

  ZeroPattern no_diag(2);
  no_diag.set(0, 1);
  no_diag.set(1, 0);
  CHECK_THROWS_AS(communication_classes(no_diag), std::invalid_argument);
}

TEST_CASE("gantmacher form on the canonical examples") {
  Rng rng(5);
  const auto positive = test_helpers::random_stochastic(3, rng);
  const auto g1 = gantmacher_form(positive);
  CHECK(g1.block_count() == 1);
  CHECK(g1.essential_count() == 1);

  const auto two_blocks = StochasticMatrix::from_rows({{0.5, 0.5, 0.0, 0.0},
                                                       {0.4, 0.6, 0.0, 0.0},
                                                       {0.0, 0.0, 0.7, 0.3},
                                                       {0.0, 0.0, 0.2, 0.8}});
  const auto g2 = gantmacher_form(two_blocks);
  CHECK(g2.block_count() == 2);
  CHECK(g2.essential_count() == 2);
  CHECK(g2.partition.classes[0] == std::vector<std::size_t>{0, 1});
  CHECK(g2.partition.classes[1] == std::vector<std::size_t>{2, 3});

  const auto chain = StochasticMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
  const auto g3 = gantmacher_form(chain);
  const auto p3 = pattern_of(chain);
  CHECK(g3.block_count() == 3);
  CHECK(g3.essential_count() == 1);
  CHECK(g3.block_all_positive(p3, 1, 0));
  CHECK(g3.block_all_positive(p3, 2, 0));
  CHECK(g3.block_all_positive(p3, 2, 1));

  CHECK_THROWS_AS(
      gantmacher_form(StochasticMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}})),
      std::invalid_argument);
}

TEST_CASE("type symmetry") {
  CHECK(is_type_symmetric(
      StochasticMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}})));
  CHECK_FALSE(is_type_symmetric(
      StochasticMatrix::from_rows({{0.5, 0.5}, {0.0, 1.0}})));
  CHECK(is_type_symmetric(
      StochasticMatrix::from_rows({{0.9, 0.1}, {0.4, 0.6}})));
}

TEST_CASE("partition and form match the closure oracle on random patterns") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(9);
    const auto p = random_posdiag_pattern(n, rng, rng.uniform(0.05, 0.6));
    const auto part = communication_classes(p);
    const auto oracle = oracle_partition(p);

    // Same classes as sets, same essential flags.
    REQUIRE(part.classes.size() == oracle.classes.size());
    std::set<std::vector<std::size_t>> got(part.classes.begin(),
                                           part.classes.end());
    for (auto cls : oracle.classes) {
      std::sort(cls.begin(), cls.end());
      CHECK(got.count(cls) == 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(is_essential_index(part, i) ==
            oracle.essential[oracle.class_of[i]]);
    }

    // Ordering respects reachability: if class J reaches class I, I first.
    const auto reach = transitive_closure(p);
    for (std::size_t cj = 0; cj < part.classes.size(); ++cj) {
      for (std::size_t ci = 0; ci < part.classes.size(); ++ci) {
        if (ci == cj) continue;
        if (reach[part.classes[cj][0]][part.classes[ci][0]]) {
          CHECK(ci < cj);
        }
      }
    }

    // Permuted pattern is block lower triangular and every inessential
    // block row has an earlier positive block.
    const auto form = gantmacher_form(p);
    for (std::size_t k = 0; k < form.block_count(); ++k) {
      for (std::size_t l = k + 1; l < form.block_count(); ++l) {
        CHECK(form.block_all_zero(p, k, l));
      }
    }
    for (std::size_t k = form.essential_count(); k < form.block_count(); ++k) {
      bool escapes = false;
      for (std::size_t l = 0; l < k; ++l) {
        if (!form.block_all_zero(p, k, l)) escapes = true;
      }
      CHECK(escapes);
    }

    // Diagonal blocks are strongly connected under the closure.
    for (std::size_t k = 0; k < form.block_count(); ++k) {
      for (std::size_t x : form.partition.classes[k]) {
        for (std::size_t y : form.partition.classes[k]) {
          CHECK(reach[x][y]);
        }
      }
    }
  }
}

TEST_CASE("block accessor reads the permuted matrix") {
  const auto a = StochasticMatrix::from_rows(
      {{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
  const auto form = gantmacher_form(a);
  const auto b10 = form.block(a, 1, 0);
  REQUIRE(b10.size() == 1);
  CHECK(b10[0] == 0.5);
  CHECK(form.block_offsets == std::vector<std::size_t>{0, 1, 2, 3});

  // permuted() agrees with the block view.
  const auto pm = permuted(a, form.permutation);
  CHECK(pm(1, 0) == b10[0]);
}
