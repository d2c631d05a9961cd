// Command-line front end: dataset generation, single-chain fitting,
// cross-validated evaluation, and predictive queries.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cmmsb/eval.hpp"
#include "cmmsb/inference.hpp"
#include "cmmsb/io.hpp"
#include "cmmsb/special.hpp"
#include "cmmsb/synthgen.hpp"

namespace fs = std::filesystem;
using namespace cmmsb;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConsistency = 3;
constexpr int kExitIo = 4;

int env_workers(int fallback) {
  const char* s = std::getenv("CMMSB_WORKERS");
  if (!s || !*s) return fallback;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end || v < 1)
    throw std::invalid_argument("CMMSB_WORKERS must be a positive integer");
  return static_cast<int>(v);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory: " + dir);
}

struct LoadedRun {
  RunConfig cfg;
  InteractionMatrix data{2};
  SubgroupMap subgroups{2, 0};
  std::string hash;
};

LoadedRun load_run(const std::string& config_path,
                   std::optional<std::uint64_t> seed,
                   std::optional<std::string> out) {
  LoadedRun run;
  run.cfg = load_run_config(config_path);
  if (seed) run.cfg.seed = *seed;
  if (out) run.cfg.output_dir = *out;
  run.data = load_interactions(run.cfg.dataset);
  run.subgroups = run.cfg.subgroups.empty()
                      ? SubgroupMap(run.data.n(), 0)
                      : load_subgroups(run.cfg.subgroups, run.data.n());
  run.cfg.to_chain_config().validate(run.subgroups.subgroup_count());
  run.hash = config_hash(canonical_config_json(run.cfg));
  return run;
}

int cmd_generate(const std::string& spec_path, const std::string& preset,
                 std::optional<std::uint64_t> seed, const std::string& out) {
  SynthSpec spec;
  if (!preset.empty()) {
    if (preset == "paper-synthetic-full")
      spec = paper_synthetic_spec(false, seed.value_or(0));
    else if (preset == "paper-synthetic-partial")
      spec = paper_synthetic_spec(true, seed.value_or(0));
    else
      throw std::invalid_argument("unknown preset: " + preset);
  } else if (!spec_path.empty()) {
    spec = load_synth_spec(spec_path);
    if (seed) spec.seed = *seed;
  } else {
    throw std::invalid_argument("generate needs --spec or --preset");
  }
  ensure_dir(out);
  const SynthResult res = generate(spec);
  const std::string hash = config_hash(canonical_synth_json(spec));
  save_interactions(res.data, out + "/data.txt");
  save_subgroups(res.subgroups, out + "/subgroups.txt");
  write_ground_truth_json(res.truth, out + "/ground_truth.json", hash,
                          spec.seed);
  std::cout << "generated n=" << spec.n << " dataset in " << out
            << " (config_hash=" << hash << ")\n";
  return 0;
}

int cmd_fit(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::string> out) {
  const LoadedRun run = load_run(config_path, seed, out);
  ensure_dir(run.cfg.output_dir);
  const Trace trace =
      run_chain(run.data, run.subgroups, run.cfg.to_chain_config());
  write_trace_json(trace, run.cfg.output_dir + "/trace.json", run.hash);
  write_predictive_csv(trace.posterior_predictive(),
                       run.cfg.output_dir + "/predictive.csv", run.hash,
                       run.cfg.seed);
  std::cout << "fit done: " << trace.iters.size() << " iterations, "
            << trace.predictive_samples << " accumulated samples, final K="
            << trace.iters.back().K << "\n";
  return 0;
}

int cmd_eval(const std::string& config_path, std::optional<std::uint64_t> seed,
             std::optional<std::string> out) {
  const LoadedRun run = load_run(config_path, seed, out);
  ensure_dir(run.cfg.output_dir);
  const int workers =
      env_workers(run.cfg.workers > 0 ? run.cfg.workers : run.cfg.folds);
  const MetricsReport rep =
      cross_validate(run.data, run.subgroups, run.cfg.to_chain_config(),
                     run.cfg.folds, workers);
  write_metrics_json(rep, run.cfg.output_dir + "/metrics.json", run.hash,
                     run.cfg.seed);
  std::cout << "eval done: test_error=" << rep.test_error_mean
            << " auc=" << rep.auc_mean << " over " << run.cfg.folds
            << " folds\n";
  return 0;
}

int cmd_predict(const std::string& trace_dir, const std::string& pairs_path,
                std::optional<std::string> out) {
  const Grid<double> pred = load_predictive_csv(trace_dir + "/predictive.csv");
  std::ifstream in(pairs_path);
  if (!in) throw io_error("cannot open pairs file: " + pairs_path);
  std::ostringstream os;
  std::string line;
  int lineno = 0;
  const int n = static_cast<int>(pred.rows());
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i, j;
    if (!(ls >> i >> j) || i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw std::invalid_argument(pairs_path + ":" + std::to_string(lineno) +
                                  ": pair indices out of range");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, pred(i, j));
    os << buf;
  }
  if (out) {
    std::ofstream of(*out);
    if (!of) throw io_error("cannot open for writing: " + *out);
    of << os.str();
  } else {
    std::cout << os.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula mixed-membership blockmodel toolkit"};
  app.require_subcommand(1);

  std::string config_path, spec_path, preset, trace_dir, pairs_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string gen_out = ".";

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  gen->add_option("--spec", spec_path, "synthetic spec (JSON)");
  gen->add_option("--preset", preset,
                  "paper-synthetic-full | paper-synthetic-partial");
  gen->add_option("--seed", seed, "rng seed override");
  gen->add_option("--out", gen_out, "output directory");

  auto* fit = app.add_subcommand("fit", "run one chain on all observed data");
  fit->add_option("--config", config_path, "run config (JSON)")->required();
  fit->add_option("--seed", seed, "rng seed override");
  fit->add_option("--out", out, "output directory override");

  auto* ev = app.add_subcommand("eval", "cross-validated link prediction");
  ev->add_option("--config", config_path, "run config (JSON)")->required();
  ev->add_option("--seed", seed, "rng seed override");
  ev->add_option("--out", out, "output directory override");

  auto* pr = app.add_subcommand("predict", "query a fitted predictive matrix");
  pr->add_option("--trace-dir", trace_dir, "directory written by fit")
      ->required();
  pr->add_option("--pairs", pairs_path, "file of 'i j' queries")->required();
  pr->add_option("--out", out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_generate(spec_path, preset, seed, gen_out);
    if (fit->parsed()) return cmd_fit(config_path, seed, out);
    if (ev->parsed()) return cmd_eval(config_path, seed, out);
    if (pr->parsed()) return cmd_predict(trace_dir, pairs_path, out);
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const consistency_error& e) {
    std::cerr << "consistency error: " << e.what() << "\n";
    return kExitConsistency;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConsistency;
  }
  return 0;
}
