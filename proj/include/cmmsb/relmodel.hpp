#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmmsb/grid.hpp"
#include "cmmsb/special.hpp"

namespace cmmsb {

struct Hyperparams {
  double alpha = 1.0;
  double gamma = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;

  void validate() const;
};

// n x n directed binary observations; -1 marks a missing cell. The diagonal
// is always missing and never scored.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(int n);

  int n() const { return n_; }
  int at(int i, int j) const { return e_(i, j); }
  bool observed(int i, int j) const { return i != j && e_(i, j) >= 0; }
  void set(int i, int j, int value);  // value in {0,1,-1}

  // Copy with the given cells additionally set missing (used for CV folds).
  InteractionMatrix masked(const std::vector<std::pair<int, int>>& cells) const;

  int observed_count() const;

 private:
  int n_;
  Grid<std::int8_t> e_;
};

// Per ordered pair, the copula subgroup label: 0 = independent, d >= 1 picks
// the d-th CopulaSpec.
class SubgroupMap {
 public:
  explicit SubgroupMap(int n, int subgroup_count = 0);

  int n() const { return n_; }
  int subgroup_count() const { return d_; }
  int at(int i, int j) const { return g_(i, j); }
  void set(int i, int j, int d);

 private:
  int n_, d_;
  Grid<std::int32_t> g_;
};

enum class WeightMode { finiteK, hdp };

// Community weights shared across nodes. In hdp mode the vector has K+1
// entries with the last one the unbroken remainder mass; in finiteK mode it
// has exactly K entries.
struct GlobalWeights {
  WeightMode mode = WeightMode::hdp;
  std::vector<double> beta;

  int K() const {
    return static_cast<int>(beta.size()) - (mode == WeightMode::hdp ? 1 : 0);
  }
  void validate() const;
};

// Sufficient statistics of the collapsed model. Indicators live with the
// sampler; this struct owns only the counts and keeps them consistent under
// add/remove. Community indices are 0-based; in hdp mode passing k == K to
// add() grows the state by one community.
class CountState {
 public:
  CountState(int n, int K);

  int n() const { return n_; }
  int K() const { return K_; }
  int N(int i, int k) const { return N_(i, k); }
  int m1(int k, int l) const { return m1_(k, l); }
  int m0(int k, int l) const { return m0_(k, l); }
  int m(int k, int l) const { return m1_(k, l) + m0_(k, l); }
  int node_total(int i) const { return node_total_[i]; }
  int community_total(int k) const { return comm_total_[k]; }
  int pair_total() const { return pair_total_; }

  // Record pair (i,j) with indicators (k,l) and edge e. allow_growth permits
  // k or l == K (new community, hdp mode).
  void add(int i, int j, int k, int l, int e, bool allow_growth);
  void remove(int i, int j, int k, int l, int e);

  // Drop empty communities (hdp compaction). Returns the removed indices in
  // descending order; the caller must relabel indicators and merge weights.
  std::vector<int> compact_empty();

  bool operator==(const CountState&) const = default;

 private:
  void grow();
  void drop_community(int k);
  int n_, K_;
  Grid<std::int32_t> N_;
  Grid<std::int32_t> m1_, m0_;
  std::vector<std::int64_t> node_total_, comm_total_;
  int pair_total_ = 0;
};

// Eq-3-style collapsed Beta-Bernoulli log likelihood of all edges.
double collapsed_edge_loglik(const CountState& counts, const Hyperparams& hp);

// Posterior predictive edge probability of cell (k,l); indices at or beyond
// K fall back to the prior mean. If exclude_e is given, one observation with
// that edge value is removed from the cell first.
double predictive_edge_prob(const CountState& counts, const Hyperparams& hp,
                            int k, int l,
                            std::optional<int> exclude_e = std::nullopt);

// min k with cumulative pi through k >= u (0-based index).
int stick_invert(const std::vector<double>& pi, double u);

}  // namespace cmmsb
