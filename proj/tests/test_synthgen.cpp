#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cmmsb/synthgen.hpp"

using namespace cmmsb;

TEST_CASE("subgroup rule names round-trip") {
  for (auto r :
       {SubgroupRule::full, SubgroupRule::first_block, SubgroupRule::none})
    CHECK(subgroup_rule_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(subgroup_rule_from_string("half"), std::invalid_argument);
}

TEST_CASE("spec validation") {
  SynthSpec s = paper_synthetic_spec(false, 1);
  CHECK_NOTHROW(s.validate());
  s.group_sizes = {20, 13, 9, 7};  // sums to 49, not n
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = paper_synthetic_spec(false, 1);
  s.group_membership(0, 0) = 0.5;  // row no longer sums to 1
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = paper_synthetic_spec(false, 1);
  s.compat(1, 1) = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = paper_synthetic_spec(false, 1);
  s.copulas.clear();  // full rule needs one copula
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("preset shape") {
  const SynthSpec full = paper_synthetic_spec(false, 3);
  CHECK(full.n == 50);
  CHECK(full.group_sizes == std::vector<int>{20, 13, 9, 8});
  CHECK(full.rule == SubgroupRule::full);
  REQUIRE(full.copulas.size() == 1);
  CHECK(full.copulas[0].family == CopulaFamily::gumbel);
  CHECK(full.copulas[0].theta == 3.5);

  const SynthSpec part = paper_synthetic_spec(true, 3);
  CHECK(part.rule == SubgroupRule::first_block);
  REQUIRE(part.copulas.size() == 2);
  CHECK(part.copulas[1].theta == 1.0);
}

TEST_CASE("generated instance is complete and labeled by rule") {
  const auto full = generate(paper_synthetic_spec(false, 9));
  CHECK(full.data.n() == 50);
  CHECK(full.data.observed_count() == 50 * 49);
  CHECK(full.truth.group_of[0] == 0);
  CHECK(full.truth.group_of[20] == 1);
  CHECK(full.truth.group_of[49] == 3);
  for (auto [i, j] : {std::pair{0, 1}, {0, 30}, {40, 41}})
    CHECK(full.subgroups.at(i, j) == 1);

  const auto part = generate(paper_synthetic_spec(true, 9));
  CHECK(part.subgroups.at(3, 17) == 1);   // inside the first block
  CHECK(part.subgroups.at(3, 25) == 2);   // crossing out of it
  CHECK(part.subgroups.at(44, 45) == 2);  // fully outside
  CHECK(part.truth.theta == std::vector<double>{3.5, 1.0});

  // Indicators recorded for every off-diagonal cell, within community range.
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      if (i == j) {
        CHECK(full.truth.s(i, j) == -1);
        continue;
      }
      CHECK(full.truth.s(i, j) >= 0);
      CHECK(full.truth.s(i, j) < 4);
      CHECK(full.truth.r(i, j) >= 0);
      CHECK(full.truth.r(i, j) < 4);
    }
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate(paper_synthetic_spec(false, 42));
  const auto b = generate(paper_synthetic_spec(false, 42));
  const auto c = generate(paper_synthetic_spec(false, 43));
  int same_ab = 0, same_ac = 0, total = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      if (i == j) continue;
      ++total;
      same_ab += a.data.at(i, j) == b.data.at(i, j);
      same_ac += a.data.at(i, j) == c.data.at(i, j);
    }
  CHECK(same_ab == total);
  CHECK(same_ac < total);
}

TEST_CASE("edge rates follow the compatibility matrix") {
  // Conditional on the recorded indicators, edges are Bernoulli(compat(s,r));
  // check the empirical rate of the dominant diagonal cell.
  const SynthSpec spec = paper_synthetic_spec(false, 1234);
  const auto res = generate(spec);
  int edges = 0, cells = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      if (i == j) continue;
      if (res.truth.s(i, j) == 0 && res.truth.r(i, j) == 0) {
        ++cells;
        edges += res.data.at(i, j);
      }
    }
  REQUIRE(cells > 100);
  const double rate = edges / double(cells);
  const double se = std::sqrt(0.95 * 0.05 / cells);
  CHECK(std::abs(rate - 0.95) < 5.0 * se);
}

TEST_CASE("copula coupling shows up in the indicator pairs") {
  // Gumbel(3.5) makes (u,v) concordant, so sender/receiver indicators agree
  // more often than under independence for nodes in the same group.
  SynthSpec dep = paper_synthetic_spec(false, 7);
  SynthSpec ind = paper_synthetic_spec(false, 7);
  ind.copulas[0].theta = 1.0;
  const auto a = generate(dep);
  const auto b = generate(ind);
  auto agree_rate = [](const SynthResult& res) {
    int agree = 0, total = 0;
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        if (i == j) continue;
        ++total;
        agree += res.truth.s(i, j) == res.truth.r(i, j);
      }
    return agree / double(total);
  };
  CHECK(agree_rate(a) > agree_rate(b) + 0.02);
}
