#include "cmmsb/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace cmmsb {

CvSplit make_folds(const InteractionMatrix& data, int fold_count,
                   RngStream& rng) {
  if (fold_count < 2)
    throw std::invalid_argument("make_folds: fold_count must be >= 2");
  CvSplit split;
  split.fold_count = fold_count;
  split.test_cells.resize(fold_count);
  for (int i = 0; i < data.n(); ++i) {
    std::vector<int> cols;
    for (int j = 0; j < data.n(); ++j)
      if (data.observed(i, j)) cols.push_back(j);
    rng.shuffle(cols);
    // Random fold offset so short rows do not always load fold 0.
    const int offset = static_cast<int>(rng.uniform_int(fold_count));
    for (std::size_t t = 0; t < cols.size(); ++t)
      split.test_cells[(offset + t) % fold_count].push_back({i, cols[t]});
  }
  return split;
}

Grid<double> posterior_predictive(const Trace& trace) {
  return trace.posterior_predictive();
}

namespace {
void check_mask(const InteractionMatrix& truth,
                const std::vector<std::pair<int, int>>& mask) {
  if (mask.empty()) throw std::invalid_argument("metrics: empty mask");
  for (auto [i, j] : mask)
    if (!truth.observed(i, j))
      throw std::invalid_argument("metrics: mask cell not observed in truth");
}
}  // namespace

double zero_one_error(const Grid<double>& pred, const InteractionMatrix& truth,
                      const std::vector<std::pair<int, int>>& mask) {
  check_mask(truth, mask);
  int wrong = 0;
  for (auto [i, j] : mask) {
    const int decided = pred(i, j) >= 0.5 ? 1 : 0;  // ties predict 1
    wrong += decided != truth.at(i, j);
  }
  return static_cast<double>(wrong) / static_cast<double>(mask.size());
}

double test_log_likelihood(const Grid<double>& pred,
                           const InteractionMatrix& truth,
                           const std::vector<std::pair<int, int>>& mask) {
  check_mask(truth, mask);
  double ll = 0.0;
  for (auto [i, j] : mask) {
    const double p = pred(i, j);
    ll += truth.at(i, j) ? std::log(p) : std::log1p(-p);
  }
  return ll;
}

std::optional<double> auc(const Grid<double>& pred,
                          const InteractionMatrix& truth,
                          const std::vector<std::pair<int, int>>& mask) {
  check_mask(truth, mask);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(mask.size());
  std::size_t pos = 0;
  for (auto [i, j] : mask) {
    scored.push_back({pred(i, j), truth.at(i, j)});
    pos += truth.at(i, j);
  }
  const std::size_t neg = scored.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Mann-Whitney via midranks (ties count one half).
  double rank_sum_pos = 0.0;
  std::size_t a = 0;
  while (a < scored.size()) {
    std::size_t b = a;
    while (b < scored.size() && scored[b].first == scored[a].first) ++b;
    const double midrank = 0.5 * static_cast<double>(a + 1 + b);  // 1-based
    for (std::size_t t = a; t < b; ++t)
      if (scored[t].second) rank_sum_pos += midrank;
    a = b;
  }
  const double u_stat =
      rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
  return u_stat / (static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport aggregate(const std::vector<FoldMetrics>& folds) {
  MetricsReport rep;
  rep.folds = folds;
  auto stats = [&](auto getter, double* mean, double* sd) {
    std::vector<double> xs;
    for (const auto& f : folds) {
      auto v = getter(f);
      if (v) xs.push_back(*v);
    }
    if (xs.empty()) {
      *mean = *sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    double m = 0.0;
    for (double x : xs) m += x;
    m /= xs.size();
    double s2 = 0.0;
    for (double x : xs) s2 += (x - m) * (x - m);
    *mean = m;
    *sd = xs.size() > 1 ? std::sqrt(s2 / (xs.size() - 1)) : 0.0;
  };
  using Opt = std::optional<double>;
  stats([](const FoldMetrics& f) { return Opt(f.train_error); },
        &rep.train_error_mean, &rep.train_error_sd);
  stats([](const FoldMetrics& f) { return Opt(f.test_error); },
        &rep.test_error_mean, &rep.test_error_sd);
  stats([](const FoldMetrics& f) { return Opt(f.test_loglik); },
        &rep.test_loglik_mean, &rep.test_loglik_sd);
  stats([](const FoldMetrics& f) { return f.auc; }, &rep.auc_mean,
        &rep.auc_sd);
  return rep;
}

MetricsReport cross_validate(const InteractionMatrix& data,
                             const SubgroupMap& subgroups,
                             const ChainConfig& cfg, int fold_count,
                             int workers) {
  RngStream fold_rng(cfg.seed, 0xf01d);
  const CvSplit split = make_folds(data, fold_count, fold_rng);
  std::vector<FoldMetrics> folds(fold_count);
  std::vector<std::exception_ptr> errors(fold_count);

  auto run_fold = [&](int f) {
    try {
      const auto& test = split.test_cells[f];
      const InteractionMatrix train = data.masked(test);
      ChainConfig fold_cfg = cfg;
      fold_cfg.stream = static_cast<std::uint64_t>(f) + 1;
      const Trace trace = run_chain(train, subgroups, fold_cfg);
      const Grid<double> pred = trace.posterior_predictive();
      std::vector<std::pair<int, int>> train_cells;
      for (int i = 0; i < train.n(); ++i)
        for (int j = 0; j < train.n(); ++j)
          if (train.observed(i, j)) train_cells.push_back({i, j});
      FoldMetrics m;
      m.train_error = zero_one_error(pred, data, train_cells);
      m.test_error = zero_one_error(pred, data, test);
      m.test_loglik = test_log_likelihood(pred, data, test);
      m.auc = auc(pred, data, test);
      m.test_entries = static_cast<int>(test.size());
      folds[f] = m;
    } catch (...) {
      errors[f] = std::current_exception();
    }
  };

  workers = std::max(1, std::min(workers, fold_count));
  if (workers == 1) {
    for (int f = 0; f < fold_count; ++f) run_fold(f);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const int f = next.fetch_add(1);
          if (f >= fold_count) return;
          run_fold(f);
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return aggregate(folds);
}

}  // namespace cmmsb
