#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmmsb/copula.hpp"
#include "cmmsb/grid.hpp"
#include "cmmsb/relmodel.hpp"
#include "cmmsb/rng.hpp"

namespace cmmsb {

enum class Variant { pi, uv };

struct ChainConfig {
  Variant variant = Variant::pi;
  WeightMode mode = WeightMode::hdp;
  int iterations = 1000;
  double burn_in_fraction = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // rng sub-stream (fold index, chain id, ...)
  int K_init = 1;
  Hyperparams hp;
  std::vector<CopulaSpec> copulas;  // subgroup d >= 1 uses copulas[d-1]
  bool resample_theta = true;
  // Tests can pin beta (and disable its resampling) to make small instances
  // exactly enumerable.
  std::optional<std::vector<double>> fixed_beta;

  void validate(int subgroup_count) const;
};

struct TraceIter {
  int K = 0;
  double loglik = 0.0;
  std::vector<double> theta;
};

struct Trace {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<TraceIter> iters;
  Grid<double> predictive_sum;  // running sum of per-cell edge probabilities
  int predictive_samples = 0;

  Grid<double> posterior_predictive() const;
};

// Joint probability table of one indicator pair given explicit memberships:
// entry (k,l) is the copula rectangle over the k-th/l-th stick intervals.
// A null/independence spec yields the outer product.
Grid<double> pi_rectangle_table(const CopulaSpec* spec,
                                const std::vector<double>& pi_i,
                                const std::vector<double>& pi_j);

// Single entry of the table above (avoids building the full grid).
double pi_rectangle_cell(const CopulaSpec* spec,
                         const std::vector<double>& pi_i,
                         const std::vector<double>& pi_j, int k, int l);

// Beta-CDF-difference probabilities of u falling into each stick interval of
// a collapsed membership with counts N_i (length K). Returns K entries in
// finiteK mode and K+1 (trailing new-community slot) in hdp mode.
std::vector<double> uv_interval_prob(double u, double alpha,
                                     const GlobalWeights& gw,
                                     const std::vector<int>& N_i);

// One MCMC chain over the collapsed model. Owns all latent state and a
// private RngStream; the public pieces exist so unit tests can drive single
// moves.
class GibbsSampler {
 public:
  struct PairObs {
    int i, j, e, d;
  };

  GibbsSampler(const InteractionMatrix& data, const SubgroupMap& subgroups,
               const ChainConfig& cfg);

  void sweep();
  Trace run();

  // Individual moves.
  void update_pair(int p);
  void resample_pi_node(int i);
  void resample_beta();
  void resample_copula_theta(int d);

  // Redraws every observed edge from its collapsed conditional; used by the
  // joint-distribution (Geweke-style) test.
  void refresh_edges(RngStream& rng);

  // State access.
  int n() const { return n_; }
  int K() const { return counts_.K(); }
  const CountState& counts() const { return counts_; }
  const GlobalWeights& weights() const { return gw_; }
  const std::vector<std::vector<double>>& pi() const { return pi_; }
  const std::vector<PairObs>& pairs() const { return pairs_; }
  int s(int p) const { return s_[p]; }
  int r(int p) const { return r_[p]; }
  double u_of(int p) const { return u_[p]; }
  double v_of(int p) const { return v_[p]; }
  double theta(int d) const { return specs_[d - 1].theta; }
  long long edge_total() const;
  RngStream& rng() { return rng_; }

  // Predictive probability of cell (i,j) under the current state: the
  // pair's cell for training entries, the indicator-marginalized prediction
  // for unobserved ones.
  double current_prediction(int i, int j);

 private:
  struct Touch {
    int p;
    bool outgoing;
  };

  void init_state();
  void instantiate_new_community();
  void apply_compaction();
  void relabel_after_removal(int k);
  std::vector<int> n_row(int i) const;
  const CopulaSpec* spec_of(int d) const;
  int sample_cell(const std::vector<double>& w, int cols, int* k, int* l);
  std::pair<double, double> sample_pair_in_cell(int p, const CopulaSpec& spec);
  double draw_u_marginal(const std::vector<int>& rows, int k);
  std::vector<int> cluster_nodes(int K);
  void draw_uv_given_cell(int p, int k, int l);
  void accumulate_predictive(Trace& tr);

  int n_;
  ChainConfig cfg_;
  Hyperparams hp_;
  bool hdp_;
  RngStream rng_;

  std::vector<PairObs> pairs_;
  std::vector<std::vector<int>> bygroup_;   // d = 1..D
  std::vector<std::vector<Touch>> touching_;  // per node
  std::vector<std::pair<int, int>> missing_;  // unobserved off-diagonal cells
  Grid<int> pair_index_;                      // (i,j) -> pair index or -1
  Grid<int> sg_label_;                        // copy of the subgroup labels

  std::vector<int> s_, r_;
  std::vector<double> u_, v_;
  CountState counts_;
  GlobalWeights gw_;
  std::vector<std::vector<double>> pi_;
  std::vector<CopulaSpec> specs_;
  std::vector<int> order_;
};

// Convenience wrapper: configure, run, return the trace.
Trace run_chain(const InteractionMatrix& data, const SubgroupMap& subgroups,
                const ChainConfig& cfg);

}  // namespace cmmsb
