#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "cmmsb/eval.hpp"
#include "cmmsb/inference.hpp"
#include "cmmsb/relmodel.hpp"
#include "cmmsb/synthgen.hpp"

namespace cmmsb {

// File-level failures (missing paths, unreadable data): CLI exit code 4.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain-text edge list: header "n <N> directed|symmetric", then one line
// "i j e" per observed entry (0-based, e in {0,1}); symmetric inputs are
// mirrored at load.
InteractionMatrix load_interactions(const std::string& path);
void save_interactions(const InteractionMatrix& m, const std::string& path);

// Lines "i j d"; unlisted pairs default to 0. Directives: "all d=1" and
// "block <a>..<b> d=1 rest d=2".
SubgroupMap load_subgroups(const std::string& path, int n);
void save_subgroups(const SubgroupMap& g, const std::string& path);

// File-backed run configuration (JSON).
struct RunConfig {
  std::string dataset;
  std::string subgroups;  // empty: no correlated subgroups
  Variant variant = Variant::pi;
  WeightMode mode = WeightMode::hdp;
  int K_init = 1;
  Hyperparams hp;
  std::vector<CopulaSpec> copulas;
  int iterations = 1000;
  double burn_in_fraction = 0.5;
  std::uint64_t seed = 0;
  int folds = 10;
  int workers = 0;  // 0: one per fold
  std::string output_dir = ".";

  ChainConfig to_chain_config() const;
};

RunConfig load_run_config(const std::string& path);
std::string canonical_config_json(const RunConfig& cfg);

SynthSpec load_synth_spec(const std::string& path);
std::string canonical_synth_json(const SynthSpec& spec);

// FNV-1a over a canonical JSON dump; embedded in every output file.
std::string config_hash(const std::string& canonical_json);

void write_trace_json(const Trace& trace, const std::string& path,
                      const std::string& hash);
void write_predictive_csv(const Grid<double>& pred, const std::string& path,
                          const std::string& hash, std::uint64_t seed);
void write_metrics_json(const MetricsReport& report, const std::string& path,
                        const std::string& hash, std::uint64_t seed);
void write_ground_truth_json(const GroundTruth& truth, const std::string& path,
                             const std::string& hash, std::uint64_t seed);

Grid<double> load_predictive_csv(const std::string& path);

}  // namespace cmmsb
