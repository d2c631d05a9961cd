#include "cmmsb/synthgen.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cmmsb/rng.hpp"

namespace cmmsb {

std::string to_string(SubgroupRule r) {
  switch (r) {
    case SubgroupRule::full: return "full";
    case SubgroupRule::first_block: return "first_block";
    case SubgroupRule::none: return "none";
  }
  return "?";
}

SubgroupRule subgroup_rule_from_string(const std::string& s) {
  if (s == "full") return SubgroupRule::full;
  if (s == "first_block") return SubgroupRule::first_block;
  if (s == "none") return SubgroupRule::none;
  throw std::invalid_argument("unknown subgroup rule: " + s);
}

void SynthSpec::validate() const {
  if (n <= 1) throw std::invalid_argument("SynthSpec: n must be > 1");
  const int total = std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
  if (total != n)
    throw std::invalid_argument("SynthSpec: group sizes must sum to n");
  for (int g : group_sizes)
    if (g <= 0) throw std::invalid_argument("SynthSpec: empty group");
  if (group_membership.rows() != group_sizes.size())
    throw std::invalid_argument("SynthSpec: membership rows != group count");
  const std::size_t K = group_membership.cols();
  if (K == 0) throw std::invalid_argument("SynthSpec: zero communities");
  for (std::size_t g = 0; g < group_membership.rows(); ++g) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double x = group_membership(g, k);
      if (!(x >= 0.0)) throw std::invalid_argument("SynthSpec: negative pi");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("SynthSpec: membership row must sum to 1");
  }
  if (compat.rows() != K || compat.cols() != K)
    throw std::invalid_argument("SynthSpec: compat must be K x K");
  for (double x : compat.data())
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("SynthSpec: compat entries outside [0,1]");
  const std::size_t needed =
      rule == SubgroupRule::full ? 1 : (rule == SubgroupRule::first_block ? 2 : 0);
  if (copulas.size() < needed)
    throw std::invalid_argument("SynthSpec: not enough copulas for rule");
  for (const auto& c : copulas) c.validate();
}

SynthResult generate(const SynthSpec& spec) {
  spec.validate();
  RngStream rng(spec.seed);
  const int n = spec.n;
  const std::size_t K = spec.group_membership.cols();

  std::vector<int> group_of(n);
  {
    int node = 0;
    for (std::size_t g = 0; g < spec.group_sizes.size(); ++g)
      for (int c = 0; c < spec.group_sizes[g]; ++c) group_of[node++] = static_cast<int>(g);
  }
  std::vector<std::vector<double>> pi(n, std::vector<double>(K));
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < K; ++k)
      pi[i][k] = spec.group_membership(group_of[i], k);

  const int D = static_cast<int>(spec.copulas.size());
  SynthResult out{InteractionMatrix(n), SubgroupMap(n, D), {}};
  out.truth.group_of = group_of;
  for (const auto& c : spec.copulas) out.truth.theta.push_back(c.theta);
  out.truth.s = Grid<int>(n, n, -1);
  out.truth.r = Grid<int>(n, n, -1);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int d = 0;
      switch (spec.rule) {
        case SubgroupRule::full: d = 1; break;
        case SubgroupRule::first_block: d = (i < 20 && j < 20) ? 1 : 2; break;
        case SubgroupRule::none: d = 0; break;
      }
      out.subgroups.set(i, j, d);
      double u, v;
      if (d > 0) {
        auto [uu, vv] = sample_pair(spec.copulas[d - 1], rng);
        u = uu;
        v = vv;
      } else {
        u = rng.uniform();
        v = rng.uniform();
      }
      const int s = stick_invert(pi[i], u);
      const int r = stick_invert(pi[j], v);
      out.truth.s(i, j) = s;
      out.truth.r(i, j) = r;
      const int e = rng.uniform() < spec.compat(s, r) ? 1 : 0;
      out.data.set(i, j, e);
    }
  return out;
}

SynthSpec paper_synthetic_spec(bool partial, std::uint64_t seed) {
  SynthSpec spec;
  spec.n = 50;
  spec.group_sizes = {20, 13, 9, 8};
  spec.group_membership = Grid<double>(4, 4);
  const double mem[4][4] = {{0.9, 0.1, 0.0, 0.0},
                            {0.0, 0.9, 0.1, 0.0},
                            {0.1, 0.05, 0.85, 0.0},
                            {0.1, 0.05, 0.05, 0.8}};
  const double cmp[4][4] = {{0.95, 0.05, 0.0, 0.0},
                            {0.05, 0.95, 0.05, 0.0},
                            {0.05, 0.0, 0.95, 0.0},
                            {0.0, 0.05, 0.0, 0.95}};
  spec.compat = Grid<double>(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      spec.group_membership(a, b) = mem[a][b];
      spec.compat(a, b) = cmp[a][b];
    }
  CopulaSpec strong{CopulaFamily::gumbel, 3.5};
  if (partial) {
    spec.rule = SubgroupRule::first_block;
    CopulaSpec weak{CopulaFamily::gumbel, 1.0};  // independence ground truth
    spec.copulas = {strong, weak};
  } else {
    spec.rule = SubgroupRule::full;
    spec.copulas = {strong};
  }
  spec.seed = seed;
  return spec;
}

}  // namespace cmmsb
