#pragma once

#include <optional>
#include <vector>

#include "cmmsb/grid.hpp"
#include "cmmsb/inference.hpp"
#include "cmmsb/relmodel.hpp"
#include "cmmsb/rng.hpp"

namespace cmmsb {

// Per-node stratified cross-validation masks over observed off-diagonal
// entries: each node's outgoing links are split as evenly as integer
// division allows, masks disjoint across folds.
struct CvSplit {
  int fold_count = 0;
  std::vector<std::vector<std::pair<int, int>>> test_cells;  // per fold
};

CvSplit make_folds(const InteractionMatrix& data, int fold_count,
                   RngStream& rng);

// Mean of the accumulated per-cell edge probabilities over the post-burn-in
// samples of the trace.
Grid<double> posterior_predictive(const Trace& trace);

double zero_one_error(const Grid<double>& pred, const InteractionMatrix& truth,
                      const std::vector<std::pair<int, int>>& mask);

double test_log_likelihood(const Grid<double>& pred,
                           const InteractionMatrix& truth,
                           const std::vector<std::pair<int, int>>& mask);

// Exact Mann-Whitney rank AUC with tie correction; nullopt when the mask
// holds a single class.
std::optional<double> auc(const Grid<double>& pred,
                          const InteractionMatrix& truth,
                          const std::vector<std::pair<int, int>>& mask);

struct FoldMetrics {
  double train_error = 0.0;
  double test_error = 0.0;
  double test_loglik = 0.0;
  std::optional<double> auc;
  int test_entries = 0;
};

struct MetricsReport {
  std::vector<FoldMetrics> folds;
  double train_error_mean = 0, train_error_sd = 0;
  double test_error_mean = 0, test_error_sd = 0;
  double test_loglik_mean = 0, test_loglik_sd = 0;
  double auc_mean = 0, auc_sd = 0;
};

MetricsReport aggregate(const std::vector<FoldMetrics>& folds);

// Ten-fold (or fold_count-fold) evaluation: one independent chain per fold
// on the masked data, scored on the held-out cells. Folds run on up to
// `workers` threads; results are deterministic in (cfg.seed, fold index).
MetricsReport cross_validate(const InteractionMatrix& data,
                             const SubgroupMap& subgroups,
                             const ChainConfig& cfg, int fold_count,
                             int workers);

}  // namespace cmmsb
