#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "cmmsb/inference.hpp"
#include "cmmsb/rng.hpp"
#include "cmmsb/special.hpp"

using namespace cmmsb;

namespace {

CopulaSpec gumbel(double th) { return {CopulaFamily::gumbel, th}; }
CopulaSpec gaussian(double th) { return {CopulaFamily::gaussian, th}; }

std::vector<double> random_simplex(RngStream& rng, int k) {
  return rng.dirichlet(std::vector<double>(k, 1.0));
}

}  // namespace

TEST_CASE("independence rectangle table is the exact outer product") {
  RngStream rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto pi = random_simplex(rng, 4);
    const auto pj = random_simplex(rng, 5);
    const auto table = pi_rectangle_table(nullptr, pi, pj);
    const CopulaSpec ind{CopulaFamily::independence, 0.0};
    const auto table2 = pi_rectangle_table(&ind, pi, pj);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t l = 0; l < 5; ++l) {
        CHECK(table(k, l) == pi[k] * pj[l]);
        CHECK(table2(k, l) == pi[k] * pj[l]);
      }
  }
}

TEST_CASE("rectangle table rows and columns reproduce the memberships") {
  RngStream rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto pi = random_simplex(rng, 3 + t % 3);
    const auto pj = random_simplex(rng, 2 + t % 4);
    for (const auto& spec :
         {gumbel(1.0 + 5.0 * rng.uniform()),
          gaussian(1.9 * rng.uniform() - 0.95)}) {
      const auto table = pi_rectangle_table(&spec, pi, pj);
      for (std::size_t k = 0; k < pi.size(); ++k) {
        double row = 0.0;
        for (std::size_t l = 0; l < pj.size(); ++l) row += table(k, l);
        CHECK(row == doctest::Approx(pi[k]).epsilon(1e-9));
      }
      for (std::size_t l = 0; l < pj.size(); ++l) {
        double col = 0.0;
        for (std::size_t k = 0; k < pi.size(); ++k) col += table(k, l);
        CHECK(col == doctest::Approx(pj[l]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("rectangle cell agrees with the full table") {
  RngStream rng(7);
  const auto pi = random_simplex(rng, 4);
  const auto pj = random_simplex(rng, 4);
  const auto spec = gumbel(2.3);
  const auto table = pi_rectangle_table(&spec, pi, pj);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l)
      CHECK(pi_rectangle_cell(&spec, pi, pj, k, l) ==
            doctest::Approx(table(k, l)).epsilon(1e-12));
}

TEST_CASE("uv interval probabilities form a distribution") {
  GlobalWeights gw{WeightMode::hdp, {0.3, 0.3, 0.2, 0.2}};
  const std::vector<int> N{5, 0, 2};
  RngStream rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto p = uv_interval_prob(rng.uniform(), 1.5, gw, N);
    REQUIRE(p.size() == 4);  // K + 1 slots in hdp mode
    double s = 0.0;
    for (double x : p) {
      CHECK(x >= 0.0);
      s += x;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
  GlobalWeights fin{WeightMode::finiteK, {0.5, 0.25, 0.25}};
  const auto q = uv_interval_prob(0.4, 1.0, fin, {1, 2, 3});
  REQUIRE(q.size() == 3);
  CHECK(std::accumulate(q.begin(), q.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("uv interval probability integrates to the collapsed mean") {
  // Integrating the interval probability over u recovers
  // (alpha beta_k + N_ik) / (alpha + sum_d N_id).
  const double alpha = 1.7;
  GlobalWeights gw{WeightMode::finiteK, {0.5, 0.3, 0.2}};
  const std::vector<int> N{4, 1, 0};
  const double total = alpha + 5.0;
  const int steps = 20001;  // Simpson, fine grid over (0,1)
  std::vector<double> acc(3, 0.0);
  const double h = 1.0 / (steps - 1);
  for (int s = 0; s < steps; ++s) {
    const double u = std::min(std::max(s * h, 1e-12), 1.0 - 1e-12);
    const double w = (s == 0 || s == steps - 1) ? 1.0 : (s % 2 ? 4.0 : 2.0);
    const auto p = uv_interval_prob(u, alpha, gw, N);
    for (int k = 0; k < 3; ++k) acc[k] += w * p[k];
  }
  for (int k = 0; k < 3; ++k) {
    const double expected = (alpha * gw.beta[k] + N[k]) / total;
    CHECK(acc[k] * h / 3.0 == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("chain config validation") {
  ChainConfig cfg;
  cfg.iterations = 1;
  CHECK_THROWS_AS(cfg.validate(0), std::invalid_argument);
  cfg = ChainConfig{};
  cfg.copulas = {};
  CHECK_THROWS_AS(cfg.validate(1), std::invalid_argument);  // missing spec
  cfg.copulas = {gumbel(2.0)};
  CHECK_NOTHROW(cfg.validate(1));
  cfg.fixed_beta = std::vector<double>{0.5, 0.5};
  cfg.mode = WeightMode::finiteK;
  cfg.K_init = 2;
  CHECK_NOTHROW(cfg.validate(0));
  cfg.K_init = 3;
  CHECK_THROWS_AS(cfg.validate(0), std::invalid_argument);
}

TEST_CASE("identical seeds give identical traces") {
  InteractionMatrix data(5);
  RngStream gen(2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) data.set(i, j, gen.uniform() < 0.4 ? 1 : 0);
  SubgroupMap sg(5, 1);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) sg.set(i, j, 1);
  ChainConfig cfg;
  cfg.iterations = 40;
  cfg.seed = 77;
  cfg.copulas = {gumbel(2.0)};
  for (auto variant : {Variant::pi, Variant::uv}) {
    cfg.variant = variant;
    const Trace a = run_chain(data, sg, cfg);
    const Trace b = run_chain(data, sg, cfg);
    REQUIRE(a.iters.size() == b.iters.size());
    for (std::size_t t = 0; t < a.iters.size(); ++t) {
      CHECK(a.iters[t].K == b.iters[t].K);
      CHECK(a.iters[t].loglik == b.iters[t].loglik);
      CHECK(a.iters[t].theta == b.iters[t].theta);
    }
    CHECK(a.predictive_sum == b.predictive_sum);
    cfg.stream = 1;
    const Trace c = run_chain(data, sg, cfg);
    cfg.stream = 0;
    bool differs = false;
    for (std::size_t t = 0; t < a.iters.size() && !differs; ++t)
      differs = a.iters[t].loglik != c.iters[t].loglik;
    CHECK(differs);
  }
}

TEST_CASE("posterior predictive entries are probabilities") {
  InteractionMatrix data(6);
  RngStream gen(3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j && gen.uniform() < 0.8)  // leave some cells missing
        data.set(i, j, gen.uniform() < 0.3 ? 1 : 0);
  ChainConfig cfg;
  cfg.iterations = 30;
  cfg.seed = 5;
  const Trace tr = run_chain(data, SubgroupMap(6, 0), cfg);
  const auto pred = tr.posterior_predictive();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      CHECK(pred(i, j) >= 0.0);
      CHECK(pred(i, j) <= 1.0);
    }
}

// Exhaustive check of the stationary indicator distribution on a two-node
// instance small enough to enumerate: two directed pairs, two communities,
// fixed weights, no copulas. The collapsed joint over the four indicators has
// 16 states; both sampler variants must reproduce it.
TEST_CASE("two-node indicator marginals match exhaustive enumeration") {
  const double alpha = 1.0;
  const std::vector<double> beta{0.6, 0.4};
  const Hyperparams hp;

  InteractionMatrix data(2);
  data.set(0, 1, 1);
  data.set(1, 0, 0);

  // Enumerate the collapsed joint.
  std::array<double, 16> weight{};
  double z = 0.0;
  for (int s0 = 0; s0 < 2; ++s0)
    for (int r0 = 0; r0 < 2; ++r0)
      for (int s1 = 0; s1 < 2; ++s1)
        for (int r1 = 0; r1 < 2; ++r1) {
          // node 0: sender of pair (0,1), receiver of pair (1,0)
          int N0[2] = {0, 0}, N1[2] = {0, 0};
          ++N0[s0];
          ++N1[r0];
          ++N1[s1];
          ++N0[r1];
          double lw = 0.0;
          for (int k = 0; k < 2; ++k) {
            lw += ln_gamma(alpha * beta[k] + N0[k]) -
                  ln_gamma(alpha * beta[k]);
            lw += ln_gamma(alpha * beta[k] + N1[k]) -
                  ln_gamma(alpha * beta[k]);
          }
          int m1[2][2] = {{0, 0}, {0, 0}}, m0[2][2] = {{0, 0}, {0, 0}};
          ++m1[s0][r0];  // e(0,1) = 1
          ++m0[s1][r1];  // e(1,0) = 0
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              lw += ln_beta(m1[k][l] + hp.lambda1, m0[k][l] + hp.lambda2) -
                    ln_beta(hp.lambda1, hp.lambda2);
          const double w = std::exp(lw);
          weight[((s0 * 2 + r0) * 2 + s1) * 2 + r1] = w;
          z += w;
        }

  ChainConfig cfg;
  cfg.mode = WeightMode::finiteK;
  cfg.K_init = 2;
  cfg.fixed_beta = beta;
  cfg.iterations = 2;
  cfg.seed = 123;
  cfg.hp = hp;

  for (auto variant : {Variant::pi, Variant::uv}) {
    cfg.variant = variant;
    GibbsSampler g(data, SubgroupMap(2, 0), cfg);
    const int burn = 2000, keep = 60000;
    for (int t = 0; t < burn; ++t) g.sweep();
    std::array<long, 16> hits{};
    for (int t = 0; t < keep; ++t) {
      g.sweep();
      hits[((g.s(0) * 2 + g.r(0)) * 2 + g.s(1)) * 2 + g.r(1)] += 1;
    }
    for (int st = 0; st < 16; ++st) {
      const double p = weight[st] / z;
      const double se = std::sqrt(p * (1.0 - p) / keep);
      // 5 sigma band plus slack for sweep-to-sweep autocorrelation.
      CHECK(std::abs(hits[st] / double(keep) - p) < 5.0 * se + 0.004);
    }
  }
}

TEST_CASE("edge refresh keeps counts consistent") {
  InteractionMatrix data(5);
  RngStream gen(9);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) data.set(i, j, gen.uniform() < 0.5 ? 1 : 0);
  ChainConfig cfg;
  cfg.iterations = 2;
  cfg.seed = 31;
  GibbsSampler g(data, SubgroupMap(5, 0), cfg);
  g.sweep();
  RngStream ext(41);
  for (int t = 0; t < 50; ++t) {
    g.refresh_edges(ext);
    CHECK(g.counts().pair_total() == 20);
    long long m = 0;
    for (int k = 0; k < g.K(); ++k)
      for (int l = 0; l < g.K(); ++l) m += g.counts().m1(k, l);
    CHECK(m == g.edge_total());
  }
}
