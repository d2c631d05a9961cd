#include "cmmsb/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cmmsb {

using nlohmann::json;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open for reading: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  return out;
}

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
  throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + what);
}

json copula_to_json(const CopulaSpec& c) {
  json j;
  j["family"] = to_string(c.family);
  if (c.family != CopulaFamily::independence) j["theta"] = c.theta;
  j["proposal_scale"] = c.proposal_scale;
  if (c.family == CopulaFamily::gumbel) j["prior_rate"] = c.prior_rate;
  return j;
}

CopulaSpec copula_from_json(const json& j) {
  CopulaSpec c;
  c.family = copula_family_from_string(j.at("family").get<std::string>());
  if (c.family != CopulaFamily::independence)
    c.theta = j.at("theta").get<double>();
  c.proposal_scale = j.value("proposal_scale", 0.25);
  c.prior_rate = j.value("prior_rate", 0.5);
  c.validate();
  return c;
}

json grid_to_json(const Grid<double>& g) {
  json rows = json::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Grid<double> grid_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected non-empty matrix");
  const std::size_t rows = j.size(), cols = j[0].size();
  Grid<double> g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols)
      throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) g(r, c) = j[r][c].get<double>();
  }
  return g;
}

json parse_json_file(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

}  // namespace

InteractionMatrix load_interactions(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
  ++lineno;
  std::istringstream hdr(line);
  std::string tag, kind;
  int n = 0;
  if (!(hdr >> tag >> n >> kind) || tag != "n" || n <= 0 ||
      (kind != "directed" && kind != "symmetric"))
    parse_fail(path, lineno, "header must be 'n <N> directed|symmetric'");
  const bool symmetric = kind == "symmetric";
  InteractionMatrix m(n);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int i, j, e;
    if (!(ls >> i >> j >> e) || i < 0 || j < 0 || i >= n || j >= n ||
        (e != 0 && e != 1))
      parse_fail(path, lineno, "expected 'i j e' with 0-based indices, e in {0,1}");
    if (i == j) parse_fail(path, lineno, "diagonal entries are excluded");
    m.set(i, j, e);
    if (symmetric) m.set(j, i, e);
  }
  return m;
}

void save_interactions(const InteractionMatrix& m, const std::string& path) {
  auto out = open_out(path);
  out << "n " << m.n() << " directed\n";
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j)
      if (m.observed(i, j)) out << i << ' ' << j << ' ' << m.at(i, j) << '\n';
}

SubgroupMap load_subgroups(const std::string& path, int n) {
  auto in = open_in(path);
  struct Entry {
    int i, j, d;
  };
  std::vector<Entry> entries;
  std::optional<int> all_label;
  std::optional<std::tuple<int, int, int, int>> block_rule;  // a,b,d_in,d_out
  std::string line;
  int lineno = 0;
  int max_d = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "all") {
      std::string rest;
      ls >> rest;
      int d;
      if (std::sscanf(rest.c_str(), "d=%d", &d) != 1 || d < 0)
        parse_fail(path, lineno, "expected 'all d=<label>'");
      all_label = d;
      max_d = std::max(max_d, d);
    } else if (first == "block") {
      std::string range, din, restw, dout;
      ls >> range >> din >> restw >> dout;
      int a, b, d1, d2;
      if (std::sscanf(range.c_str(), "%d..%d", &a, &b) != 2 ||
          std::sscanf(din.c_str(), "d=%d", &d1) != 1 || restw != "rest" ||
          std::sscanf(dout.c_str(), "d=%d", &d2) != 1 || a < 0 || b < a ||
          b >= n || d1 < 0 || d2 < 0)
        parse_fail(path, lineno, "expected 'block <a>..<b> d=<x> rest d=<y>'");
      block_rule = {a, b, d1, d2};
      max_d = std::max({max_d, d1, d2});
    } else {
      std::istringstream ls2(line);
      int i, j, d;
      if (!(ls2 >> i >> j >> d) || i < 0 || j < 0 || i >= n || j >= n || d < 0)
        parse_fail(path, lineno, "expected 'i j d' or a directive");
      entries.push_back({i, j, d});
      max_d = std::max(max_d, d);
    }
  }
  SubgroupMap g(n, max_d);
  if (all_label)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) g.set(i, j, *all_label);
  if (block_rule) {
    auto [a, b, d1, d2] = *block_rule;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const bool inside = i >= a && i <= b && j >= a && j <= b;
        g.set(i, j, inside ? d1 : d2);
      }
  }
  for (const auto& e : entries) g.set(e.i, e.j, e.d);
  return g;
}

void save_subgroups(const SubgroupMap& g, const std::string& path) {
  auto out = open_out(path);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      if (i != j && g.at(i, j) != 0)
        out << i << ' ' << j << ' ' << g.at(i, j) << '\n';
}

ChainConfig RunConfig::to_chain_config() const {
  ChainConfig cc;
  cc.variant = variant;
  cc.mode = mode;
  cc.iterations = iterations;
  cc.burn_in_fraction = burn_in_fraction;
  cc.seed = seed;
  cc.K_init = K_init;
  cc.hp = hp;
  cc.copulas = copulas;
  return cc;
}

RunConfig load_run_config(const std::string& path) {
  const json j = parse_json_file(path);
  RunConfig c;
  try {
    c.dataset = j.at("dataset").get<std::string>();
    c.subgroups = j.value("subgroups", std::string());
    const std::string v = j.value("variant", "pi");
    if (v != "pi" && v != "uv")
      throw std::invalid_argument("variant must be 'pi' or 'uv'");
    c.variant = v == "pi" ? Variant::pi : Variant::uv;
    const std::string m = j.value("mode", "hdp");
    if (m != "hdp" && m != "finiteK")
      throw std::invalid_argument("mode must be 'hdp' or 'finiteK'");
    c.mode = m == "hdp" ? WeightMode::hdp : WeightMode::finiteK;
    c.K_init = j.value("K_init", 1);
    c.hp.alpha = j.value("alpha", 1.0);
    c.hp.gamma = j.value("gamma", 1.0);
    c.hp.lambda1 = j.value("lambda1", 1.0);
    c.hp.lambda2 = j.value("lambda2", 1.0);
    if (j.contains("copulas"))
      for (const auto& cj : j.at("copulas"))
        c.copulas.push_back(copula_from_json(cj));
    c.iterations = j.value("iterations", 1000);
    c.burn_in_fraction = j.value("burn_in_fraction", 0.5);
    c.seed = j.value("seed", std::uint64_t{0});
    c.folds = j.value("folds", 10);
    c.workers = j.value("workers", 0);
    c.output_dir = j.value("output_dir", ".");
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return c;
}

std::string canonical_config_json(const RunConfig& c) {
  json j;
  j["dataset"] = c.dataset;
  j["subgroups"] = c.subgroups;
  j["variant"] = c.variant == Variant::pi ? "pi" : "uv";
  j["mode"] = c.mode == WeightMode::hdp ? "hdp" : "finiteK";
  j["K_init"] = c.K_init;
  j["alpha"] = c.hp.alpha;
  j["gamma"] = c.hp.gamma;
  j["lambda1"] = c.hp.lambda1;
  j["lambda2"] = c.hp.lambda2;
  j["copulas"] = json::array();
  for (const auto& cp : c.copulas) j["copulas"].push_back(copula_to_json(cp));
  j["iterations"] = c.iterations;
  j["burn_in_fraction"] = c.burn_in_fraction;
  j["seed"] = c.seed;
  j["folds"] = c.folds;
  return j.dump();
}

SynthSpec load_synth_spec(const std::string& path) {
  const json j = parse_json_file(path);
  SynthSpec s;
  try {
    s.n = j.at("n").get<int>();
    s.group_sizes = j.at("group_sizes").get<std::vector<int>>();
    s.group_membership = grid_from_json(j.at("group_membership"));
    s.compat = grid_from_json(j.at("compat"));
    s.rule = subgroup_rule_from_string(j.value("rule", "full"));
    if (j.contains("copulas"))
      for (const auto& cj : j.at("copulas"))
        s.copulas.push_back(copula_from_json(cj));
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  s.validate();
  return s;
}

std::string canonical_synth_json(const SynthSpec& s) {
  json j;
  j["n"] = s.n;
  j["group_sizes"] = s.group_sizes;
  j["group_membership"] = grid_to_json(s.group_membership);
  j["compat"] = grid_to_json(s.compat);
  j["rule"] = to_string(s.rule);
  j["copulas"] = json::array();
  for (const auto& cp : s.copulas) j["copulas"].push_back(copula_to_json(cp));
  j["seed"] = s.seed;
  return j.dump();
}

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_trace_json(const Trace& trace, const std::string& path,
                      const std::string& hash) {
  json j;
  j["config_hash"] = hash;
  j["seed"] = trace.seed;
  j["n"] = trace.n;
  j["predictive_samples"] = trace.predictive_samples;
  json iters = json::array();
  for (const auto& it : trace.iters) {
    json ji;
    ji["K"] = it.K;
    ji["loglik"] = it.loglik;
    ji["theta"] = it.theta;
    iters.push_back(std::move(ji));
  }
  j["iterations"] = std::move(iters);
  open_out(path) << j.dump(2) << '\n';
}

void write_predictive_csv(const Grid<double>& pred, const std::string& path,
                          const std::string& hash, std::uint64_t seed) {
  auto out = open_out(path);
  out << "# config_hash=" << hash << " seed=" << seed << '\n';
  char buf[32];
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    for (std::size_t j = 0; j < pred.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", pred(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

Grid<double> load_predictive_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path + ": no data rows");
  Grid<double> g(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw io_error(path + ": ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) g(i, j) = rows[i][j];
  }
  return g;
}

void write_metrics_json(const MetricsReport& rep, const std::string& path,
                        const std::string& hash, std::uint64_t seed) {
  json j;
  j["config_hash"] = hash;
  j["seed"] = seed;
  json folds = json::array();
  for (const auto& f : rep.folds) {
    json jf;
    jf["train_error"] = f.train_error;
    jf["test_error"] = f.test_error;
    jf["test_loglik"] = f.test_loglik;
    jf["test_entries"] = f.test_entries;
    if (f.auc)
      jf["auc"] = *f.auc;
    else
      jf["auc"] = nullptr;
    folds.push_back(std::move(jf));
  }
  j["folds"] = std::move(folds);
  json agg;
  agg["train_error_mean"] = rep.train_error_mean;
  agg["train_error_sd"] = rep.train_error_sd;
  agg["test_error_mean"] = rep.test_error_mean;
  agg["test_error_sd"] = rep.test_error_sd;
  agg["test_loglik_mean"] = rep.test_loglik_mean;
  agg["test_loglik_sd"] = rep.test_loglik_sd;
  agg["auc_mean"] = rep.auc_mean;
  agg["auc_sd"] = rep.auc_sd;
  j["aggregate"] = std::move(agg);
  open_out(path) << j.dump(2) << '\n';
}

void write_ground_truth_json(const GroundTruth& truth, const std::string& path,
                             const std::string& hash, std::uint64_t seed) {
  json j;
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["group_of"] = truth.group_of;
  j["theta"] = truth.theta;
  auto mat = [](const Grid<int>& g) {
    json rows = json::array();
    for (std::size_t r = 0; r < g.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["s"] = mat(truth.s);
  j["r"] = mat(truth.r);
  open_out(path) << j.dump(2) << '\n';
}

}  // namespace cmmsb
