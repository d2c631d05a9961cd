#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cmmsb/relmodel.hpp"
#include "cmmsb/rng.hpp"
#include "cmmsb/special.hpp"

using namespace cmmsb;

TEST_CASE("hyperparams must be strictly positive") {
  CHECK_NOTHROW(Hyperparams{}.validate());
  Hyperparams h;
  h.alpha = 0.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h = Hyperparams{};
  h.lambda2 = -1.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("interaction matrix basics") {
  InteractionMatrix m(4);
  CHECK(m.observed_count() == 0);
  m.set(0, 1, 1);
  m.set(1, 0, 0);
  m.set(2, 3, 1);
  CHECK(m.observed(0, 1));
  CHECK(!m.observed(0, 2));
  CHECK(!m.observed(0, 0));
  CHECK(m.at(0, 1) == 1);
  CHECK(m.observed_count() == 3);
  CHECK_THROWS_AS(m.set(1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(m.set(0, 4, 1), std::out_of_range);
  CHECK_THROWS_AS(m.set(0, 1, 2), std::invalid_argument);

  const auto masked = m.masked({{0, 1}});
  CHECK(!masked.observed(0, 1));
  CHECK(masked.observed(1, 0));
  CHECK(masked.observed_count() == 2);
  CHECK(m.observed(0, 1));  // original untouched
}

TEST_CASE("subgroup map label bounds") {
  SubgroupMap g(3, 2);
  CHECK(g.subgroup_count() == 2);
  g.set(0, 1, 2);
  CHECK(g.at(0, 1) == 2);
  CHECK(g.at(1, 0) == 0);  // default independent
  CHECK_THROWS_AS(g.set(0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(g.set(0, 1, -1), std::invalid_argument);
}

TEST_CASE("global weights validation") {
  GlobalWeights w{WeightMode::finiteK, {0.5, 0.5}};
  CHECK_NOTHROW(w.validate());
  CHECK(w.K() == 2);
  GlobalWeights h{WeightMode::hdp, {0.4, 0.4, 0.2}};
  CHECK(h.K() == 2);  // trailing entry is remainder mass
  GlobalWeights bad{WeightMode::finiteK, {0.6, 0.6}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("count state add/remove are exact inverses") {
  CountState c(4, 3);
  const CountState fresh = c;
  c.add(0, 1, 0, 2, 1, false);
  c.add(1, 2, 1, 1, 0, false);
  c.add(3, 0, 2, 0, 1, false);
  CHECK(c.pair_total() == 3);
  CHECK(c.N(0, 0) == 2);  // sender of (0,1) and receiver of (3,0)
  CHECK(c.N(1, 2) == 1);
  CHECK(c.m1(0, 2) == 1);
  CHECK(c.m0(1, 1) == 1);
  CHECK(c.node_total(0) == 2);
  CHECK(c.community_total(0) == 2);
  c.remove(3, 0, 2, 0, 1);
  c.remove(1, 2, 1, 1, 0);
  c.remove(0, 1, 0, 2, 1);
  CHECK(c == fresh);
  CHECK_THROWS_AS(c.remove(0, 1, 0, 2, 1), consistency_error);
}

TEST_CASE("count state matches a rebuilt state after random churn") {
  RngStream rng(31);
  const int n = 6, K = 3;
  CountState c(n, K);
  struct Rec {
    int i, j, k, l, e;
  };
  std::vector<Rec> live;
  for (int t = 0; t < 500; ++t) {
    if (!live.empty() && rng.uniform() < 0.4) {
      const auto idx = rng.uniform_int(live.size());
      const Rec r = live[idx];
      c.remove(r.i, r.j, r.k, r.l, r.e);
      live.erase(live.begin() + idx);
    } else {
      Rec r;
      r.i = static_cast<int>(rng.uniform_int(n));
      do r.j = static_cast<int>(rng.uniform_int(n));
      while (r.j == r.i);
      r.k = static_cast<int>(rng.uniform_int(K));
      r.l = static_cast<int>(rng.uniform_int(K));
      r.e = static_cast<int>(rng.uniform_int(2));
      c.add(r.i, r.j, r.k, r.l, r.e, false);
      live.push_back(r);
    }
  }
  CountState rebuilt(n, K);
  for (const auto& r : live) rebuilt.add(r.i, r.j, r.k, r.l, r.e, false);
  CHECK(c == rebuilt);
}

TEST_CASE("growth by one shared community and compaction") {
  CountState c(3, 2);
  c.add(0, 1, 0, 0, 1, false);
  CHECK_THROWS_AS(c.add(0, 2, 2, 0, 1, false), std::invalid_argument);
  c.add(0, 2, 2, 2, 1, true);  // both-new collapses into one new community
  CHECK(c.K() == 3);
  CHECK(c.m1(2, 2) == 1);
  c.remove(0, 2, 2, 2, 1);
  const auto removed = c.compact_empty();
  CHECK(removed == std::vector<int>{2, 1});  // descending, community 1 unused
  CHECK(c.K() == 1);
  CHECK(c.m1(0, 0) == 1);
}

TEST_CASE("collapsed edge loglik closed form") {
  // Single occupied cell with m1=2, m0=1 and unit Beta prior:
  // ln B(3,2) - ln B(1,1) = ln(1/12).
  CountState c(3, 2);
  Hyperparams hp;
  c.add(0, 1, 0, 0, 1, false);
  c.add(1, 2, 0, 0, 1, false);
  c.add(2, 0, 0, 0, 0, false);
  CHECK(collapsed_edge_loglik(c, hp) ==
        doctest::Approx(-2.48490664978800031).epsilon(1e-13));
  // Second cell contributes independently: ln B(2,1) = -ln 2.
  c.add(0, 2, 1, 1, 1, false);
  CHECK(collapsed_edge_loglik(c, hp) ==
        doctest::Approx(-2.48490664978800031 - std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("predictive edge probability") {
  CountState c(3, 2);
  Hyperparams hp;  // lambda1 = lambda2 = 1
  c.add(0, 1, 0, 0, 1, false);
  c.add(1, 2, 0, 0, 1, false);
  c.add(2, 0, 0, 0, 0, false);
  CHECK(predictive_edge_prob(c, hp, 0, 0) ==
        doctest::Approx(3.0 / 5.0).epsilon(1e-15));
  CHECK(predictive_edge_prob(c, hp, 0, 0, 1) ==
        doctest::Approx(2.0 / 4.0).epsilon(1e-15));
  // Untouched cell and out-of-range cell fall back to the prior mean.
  CHECK(predictive_edge_prob(c, hp, 1, 1) == doctest::Approx(0.5));
  CHECK(predictive_edge_prob(c, hp, 5, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(predictive_edge_prob(c, hp, 1, 1, 1), consistency_error);
}

TEST_CASE("stick inversion") {
  const std::vector<double> pi{0.2, 0.5, 0.3};
  CHECK(stick_invert(pi, 0.1) == 0);
  CHECK(stick_invert(pi, 0.2) == 0);  // boundary goes to the lower stick
  CHECK(stick_invert(pi, 0.21) == 1);
  CHECK(stick_invert(pi, 0.7) == 1);
  CHECK(stick_invert(pi, 0.99) == 2);
  CHECK(stick_invert(pi, 1.0) == 2);
  CHECK(stick_invert({0.5, 0.5, 0.0}, 1.0) == 1);  // skips zero-mass tail
}
