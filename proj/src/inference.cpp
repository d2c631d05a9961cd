#include "cmmsb/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cmmsb {

namespace {

const CopulaSpec& independence_spec() {
  static const CopulaSpec s{CopulaFamily::independence, 0.0, 0.0, 0.5};
  return s;
}

bool effectively_independent(const CopulaSpec* spec) {
  return spec == nullptr || spec->family == CopulaFamily::independence;
}

// Cumulative stick breakpoints with the final one pinned to 1.
std::vector<double> cum_breaks(const std::vector<double>& pi) {
  std::vector<double> c(pi.size() + 1, 0.0);
  double run = 0.0;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    run += pi[k];
    c[k + 1] = std::min(run, 1.0);
  }
  c[pi.size()] = 1.0;
  return c;
}

double clamp_cell(double m) {
  if (m < 0.0) {
    if (m < -1e-12)
      throw consistency_error("rectangle table: negative cell beyond round-off");
    return 0.0;
  }
  return std::min(m, 1.0);
}

}  // namespace

void ChainConfig::validate(int subgroup_count) const {
  if (iterations < 2)
    throw std::invalid_argument("ChainConfig: iterations must be >= 2");
  if (!(burn_in_fraction > 0.0) || !(burn_in_fraction < 1.0))
    throw std::invalid_argument("ChainConfig: burn_in_fraction outside (0,1)");
  if (K_init < 1) throw std::invalid_argument("ChainConfig: K_init must be >= 1");
  hp.validate();
  if (static_cast<int>(copulas.size()) < subgroup_count)
    throw std::invalid_argument(
        "ChainConfig: a CopulaSpec is required for every subgroup label");
  for (const auto& c : copulas) c.validate();
  if (fixed_beta) {
    GlobalWeights gw{mode, *fixed_beta};
    gw.validate();
    if (gw.K() != K_init)
      throw std::invalid_argument("ChainConfig: fixed_beta length mismatch");
  }
}

Grid<double> Trace::posterior_predictive() const {
  if (predictive_samples == 0)
    throw std::invalid_argument("Trace: no post-burn-in samples accumulated");
  Grid<double> out = predictive_sum;
  for (auto& x : out.data()) x /= predictive_samples;
  return out;
}

Grid<double> pi_rectangle_table(const CopulaSpec* spec,
                                const std::vector<double>& pi_i,
                                const std::vector<double>& pi_j) {
  const std::size_t li = pi_i.size(), lj = pi_j.size();
  Grid<double> out(li, lj);
  if (effectively_independent(spec)) {
    for (std::size_t k = 0; k < li; ++k)
      for (std::size_t l = 0; l < lj; ++l) out(k, l) = pi_i[k] * pi_j[l];
    return out;
  }
  const auto ci = cum_breaks(pi_i);
  const auto cj = cum_breaks(pi_j);
  Grid<double> c(li + 1, lj + 1);
  for (std::size_t a = 0; a <= li; ++a)
    for (std::size_t b = 0; b <= lj; ++b)
      c(a, b) = copula_cdf(*spec, ci[a], cj[b]);
  for (std::size_t k = 0; k < li; ++k)
    for (std::size_t l = 0; l < lj; ++l)
      out(k, l) = clamp_cell(c(k + 1, l + 1) + c(k, l) - c(k + 1, l) -
                             c(k, l + 1));
  return out;
}

double pi_rectangle_cell(const CopulaSpec* spec,
                         const std::vector<double>& pi_i,
                         const std::vector<double>& pi_j, int k, int l) {
  if (effectively_independent(spec)) return pi_i[k] * pi_j[l];
  double u_lo = 0.0, v_lo = 0.0;
  for (int q = 0; q < k; ++q) u_lo += pi_i[q];
  for (int q = 0; q < l; ++q) v_lo += pi_j[q];
  u_lo = std::min(u_lo, 1.0);
  v_lo = std::min(v_lo, 1.0);
  double u_hi = (k + 1 == static_cast<int>(pi_i.size()))
                    ? 1.0
                    : std::min(u_lo + pi_i[k], 1.0);
  double v_hi = (l + 1 == static_cast<int>(pi_j.size()))
                    ? 1.0
                    : std::min(v_lo + pi_j[l], 1.0);
  return rectangle_mass(*spec, u_lo, u_hi, v_lo, v_hi);
}

std::vector<double> uv_interval_prob(double u, double alpha,
                                     const GlobalWeights& gw,
                                     const std::vector<int>& N_i) {
  const int K = gw.K();
  if (static_cast<int>(N_i.size()) != K)
    throw consistency_error("uv_interval_prob: count row length mismatch");
  const bool hdp = gw.mode == WeightMode::hdp;
  const int slots = K + (hdp ? 1 : 0);
  double total = alpha;  // beta sums to one
  for (int k = 0; k < K; ++k) {
    if (N_i[k] < 0) throw consistency_error("uv_interval_prob: negative count");
    total += N_i[k];
  }
  std::vector<double> out(slots);
  double h = 0.0;
  double prev = 1.0;  // I_u(h^0, hhat^0) boundary
  for (int k = 0; k < slots; ++k) {
    h += alpha * gw.beta[k] + (k < K ? N_i[k] : 0);
    double curr;
    if (k == slots - 1) {
      curr = 0.0;  // I_u(h^{K+1}, hhat^{K+1}) boundary
    } else {
      const double hhat = std::max(total - h, 1e-12);
      curr = reg_inc_beta(u, h, hhat);
    }
    double val = prev - curr;
    if (val < 0.0) {
      if (val < -1e-12)
        throw consistency_error("uv_interval_prob: negative entry");
      val = 0.0;
    }
    out[k] = val;
    prev = curr;
  }
  return out;
}

GibbsSampler::GibbsSampler(const InteractionMatrix& data,
                           const SubgroupMap& subgroups,
                           const ChainConfig& cfg)
    : n_(data.n()),
      cfg_(cfg),
      hp_(cfg.hp),
      hdp_(cfg.mode == WeightMode::hdp),
      rng_(cfg.seed, cfg.stream),
      pair_index_(data.n(), data.n(), -1),
      sg_label_(data.n(), data.n(), 0),
      counts_(data.n(), cfg.K_init) {
  if (subgroups.n() != n_)
    throw std::invalid_argument("GibbsSampler: subgroup map size mismatch");
  cfg_.validate(subgroups.subgroup_count());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) sg_label_(i, j) = subgroups.at(i, j);

  bygroup_.resize(subgroups.subgroup_count() + 1);
  touching_.resize(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      if (data.observed(i, j)) {
        const int p = static_cast<int>(pairs_.size());
        pairs_.push_back({i, j, data.at(i, j), subgroups.at(i, j)});
        pair_index_(i, j) = p;
        if (pairs_[p].d > 0) bygroup_[pairs_[p].d].push_back(p);
        touching_[i].push_back({p, true});
        touching_[j].push_back({p, false});
      } else {
        missing_.push_back({i, j});
      }
    }
  if (pairs_.empty())
    throw std::invalid_argument("GibbsSampler: no observed pairs");
  specs_ = cfg_.copulas;
  order_.resize(pairs_.size());
  std::iota(order_.begin(), order_.end(), 0);
  init_state();
}

const CopulaSpec* GibbsSampler::spec_of(int d) const {
  return d > 0 ? &specs_[d - 1] : nullptr;
}

void GibbsSampler::init_state() {
  const int K = cfg_.K_init;
  gw_.mode = cfg_.mode;
  if (cfg_.fixed_beta) {
    gw_.beta = *cfg_.fixed_beta;
  } else if (hdp_) {
    gw_.beta.clear();
    double rem = 1.0;
    for (int k = 0; k < K; ++k) {
      const double b = rng_.beta(1.0, hp_.gamma);
      gw_.beta.push_back(b * rem);
      rem *= (1.0 - b);
    }
    gw_.beta.push_back(rem);
  } else {
    gw_.beta = rng_.dirichlet(std::vector<double>(K, hp_.gamma));
  }
  gw_.validate();

  if (cfg_.variant == Variant::pi) {
    pi_.resize(n_);
    std::vector<double> w(gw_.beta.size());
    for (int i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < w.size(); ++k)
        w[k] = std::max(hp_.alpha * gw_.beta[k], 1e-12);
      pi_[i] = rng_.dirichlet(w);
    }
  }

  s_.assign(pairs_.size(), -1);
  r_.assign(pairs_.size(), -1);
  if (cfg_.variant == Variant::uv) {
    u_.resize(pairs_.size());
    v_.resize(pairs_.size());
    for (std::size_t p = 0; p < pairs_.size(); ++p) {
      const CopulaSpec* sp = spec_of(pairs_[p].d);
      auto [u, v] = sample_pair(sp ? *sp : independence_spec(), rng_);
      u_[p] = u;
      v_[p] = v;
    }
  }
  // Seed the indicators from a k-means clustering of adjacency profiles.
  // A uniform random start is symmetric across communities and the
  // single-site kernel can take very long to break that symmetry; starting
  // from rough connectivity clusters removes the stall without affecting the
  // stationary distribution.
  const auto label = cluster_nodes(K);
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    s_[p] = label[pairs_[p].i];
    r_[p] = label[pairs_[p].j];
    counts_.add(pairs_[p].i, pairs_[p].j, s_[p], r_[p], pairs_[p].e, false);
  }
  if (hdp_ && !cfg_.fixed_beta) apply_compaction();
  // Memberships start at their count posterior so the first sweep conditions
  // on the clustered labels rather than a symmetric prior draw.
  for (int i = 0; i < n_; ++i) resample_pi_node(i);
}

std::vector<int> GibbsSampler::cluster_nodes(int K) {
  std::vector<int> label(n_, 0);
  if (K <= 1 || n_ <= K) {
    for (int i = 0; i < n_; ++i) label[i] = i % K;
    return label;
  }
  double dens = 0.0;
  for (const auto& pr : pairs_) dens += pr.e;
  dens /= static_cast<double>(pairs_.size());
  // Row i holds node i's outgoing then incoming profile; unobserved cells sit
  // at the overall density so they pull toward no cluster in particular.
  std::vector<std::vector<double>> f(n_, std::vector<double>(2 * n_, dens));
  for (const auto& pr : pairs_) {
    f[pr.i][pr.j] = pr.e;
    f[pr.j][n_ + pr.i] = pr.e;
  }
  const auto dist2 = [&](const std::vector<double>& a,
                         const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) s += (a[t] - b[t]) * (a[t] - b[t]);
    return s;
  };
  double best_sse = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 8; ++rep) {
    // k-means++ seeding, then Lloyd.
    std::vector<std::vector<double>> centre;
    centre.push_back(f[rng_.uniform_int(n_)]);
    while (static_cast<int>(centre.size()) < K) {
      std::vector<double> w(n_);
      double tot = 0.0;
      for (int i = 0; i < n_; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : centre) m = std::min(m, dist2(f[i], c));
        w[i] = m;
        tot += m;
      }
      double x = rng_.uniform() * tot;
      int pick = n_ - 1;
      for (int i = 0; i < n_; ++i) {
        x -= w[i];
        if (x <= 0.0) { pick = i; break; }
      }
      centre.push_back(f[pick]);
    }
    std::vector<int> lab(n_, 0);
    for (int round = 0; round < 20; ++round) {
      bool moved = false;
      for (int i = 0; i < n_; ++i) {
        int best = 0;
        double bd = dist2(f[i], centre[0]);
        for (int k = 1; k < K; ++k) {
          const double d = dist2(f[i], centre[k]);
          if (d < bd) { bd = d; best = k; }
        }
        if (best != lab[i]) { lab[i] = best; moved = true; }
      }
      for (int k = 0; k < K; ++k) {
        std::vector<double> m(2 * n_, 0.0);
        int c = 0;
        for (int i = 0; i < n_; ++i)
          if (lab[i] == k) {
            ++c;
            for (int t = 0; t < 2 * n_; ++t) m[t] += f[i][t];
          }
        if (c == 0) {
          centre[k] = f[rng_.uniform_int(n_)];
          moved = true;
        } else {
          for (double& x2 : m) x2 /= c;
          centre[k] = std::move(m);
        }
      }
      if (!moved) break;
    }
    double sse = 0.0;
    for (int i = 0; i < n_; ++i) sse += dist2(f[i], centre[lab[i]]);
    if (sse < best_sse) {
      best_sse = sse;
      label = lab;
    }
  }
  return label;
}

void GibbsSampler::relabel_after_removal(int k) {
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    if (s_[p] > k) --s_[p];
    if (r_[p] > k) --r_[p];
  }
}

void GibbsSampler::apply_compaction() {
  if (!hdp_ || cfg_.fixed_beta) return;
  const auto removed = counts_.compact_empty();  // descending order
  for (int k : removed) {
    gw_.beta.back() += gw_.beta[k];
    gw_.beta.erase(gw_.beta.begin() + k);
    if (cfg_.variant == Variant::pi) {
      for (auto& pi : pi_) {
        pi.back() += pi[k];
        pi.erase(pi.begin() + k);
      }
    }
    relabel_after_removal(k);
  }
}

void GibbsSampler::instantiate_new_community() {
  const double rem = gw_.beta.back();
  const double b = rng_.beta(1.0, hp_.gamma);
  const double bn = std::max(b * rem, 1e-300);
  const double rem2 = std::max(rem - bn, 1e-300);
  gw_.beta.back() = bn;
  gw_.beta.push_back(rem2);
  if (cfg_.variant == Variant::pi) {
    const double a1 = std::max(hp_.alpha * bn, 1e-12);
    const double a2 = std::max(hp_.alpha * rem2, 1e-12);
    for (auto& pi : pi_) {
      const double pr = pi.back();
      const double c = rng_.beta(a1, a2);
      pi.back() = c * pr;
      pi.push_back((1.0 - c) * pr);
    }
  }
}

std::vector<int> GibbsSampler::n_row(int i) const {
  std::vector<int> row(counts_.K());
  for (int k = 0; k < counts_.K(); ++k) row[k] = counts_.N(i, k);
  return row;
}

int GibbsSampler::sample_cell(const std::vector<double>& w, int cols, int* k,
                              int* l) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0) || !std::isfinite(total))
    throw consistency_error("sample_cell: degenerate cell weights");
  double target = rng_.uniform() * total;
  std::size_t idx = 0;
  for (; idx + 1 < w.size(); ++idx) {
    target -= w[idx];
    if (target <= 0.0) break;
  }
  *k = static_cast<int>(idx) / cols;
  *l = static_cast<int>(idx) % cols;
  return static_cast<int>(idx);
}

double GibbsSampler::draw_u_marginal(const std::vector<int>& rows, int k) {
  // Marginal of the copula coordinate given its interval index, memberships
  // collapsed: draw the stick panel from its conjugate posterior (indicator's
  // own count added back), then a uniform point inside the k-th interval.
  std::vector<double> w(gw_.beta.size());
  for (std::size_t d = 0; d < w.size(); ++d) {
    double a = hp_.alpha * gw_.beta[d];
    if (d < rows.size()) a += rows[d];
    w[d] = std::max(a, 1e-12);
  }
  w[k] += 1.0;
  const auto pi = rng_.dirichlet(w);
  double lo = 0.0;
  for (int q = 0; q < k; ++q) lo += pi[q];
  return std::clamp(lo + rng_.uniform() * pi[k], 1e-12, 1.0 - 1e-12);
}

void GibbsSampler::draw_uv_given_cell(int p, int k, int l) {
  // Fresh auxiliary (u,v) for the pair from its conditional given the current
  // cell: density proportional to c(u,v) * P(u in interval k) * P(v in
  // interval l), the latter two being Beta-CDF-difference envelopes. Keeping
  // the coordinates transient (redrawn here every visit) is what makes the
  // count-based indicator conditional exact.
  const PairObs& pr = pairs_[p];
  auto rows_i = n_row(pr.i);
  auto rows_j = n_row(pr.j);
  rows_i[k] -= 1;  // exclude this pair's own contribution
  rows_j[l] -= 1;
  const CopulaSpec* sp = spec_of(pr.d);
  if (sp && sp->family != CopulaFamily::independence) {
    // Rejection from the copula; the envelopes are bounded by 1.
    for (int t = 0; t < 2048; ++t) {
      auto [u, v] = sample_pair(*sp, rng_);
      const double g = uv_interval_prob(u, hp_.alpha, gw_, rows_i)[k];
      const double h = uv_interval_prob(v, hp_.alpha, gw_, rows_j)[l];
      if (rng_.uniform() < g * h) {
        u_[p] = u;
        v_[p] = v;
        return;
      }
    }
    // Negligible cell mass: ignore the copula coupling for this one draw.
  }
  u_[p] = draw_u_marginal(rows_i, k);
  v_[p] = draw_u_marginal(rows_j, l);
}

void GibbsSampler::update_pair(int p) {
  PairObs& pr = pairs_[p];
  if (cfg_.variant == Variant::uv) draw_uv_given_cell(p, s_[p], r_[p]);
  counts_.remove(pr.i, pr.j, s_[p], r_[p], pr.e);
  s_[p] = r_[p] = -1;
  apply_compaction();
  const int K = counts_.K();
  const int slots = K + (hdp_ && !cfg_.fixed_beta ? 1 : 0);
  const CopulaSpec* sp = spec_of(pr.d);

  std::vector<double> w(static_cast<std::size_t>(slots) * slots);
  if (cfg_.variant == Variant::pi) {
    const auto table = pi_rectangle_table(sp, pi_[pr.i], pi_[pr.j]);
    for (int k = 0; k < slots; ++k)
      for (int l = 0; l < slots; ++l) {
        const double pe = predictive_edge_prob(counts_, hp_, k, l);
        w[k * slots + l] = table(k, l) * (pr.e ? pe : 1.0 - pe);
      }
  } else {
    const auto ai = uv_interval_prob(u_[p], hp_.alpha, gw_, n_row(pr.i));
    const auto aj = uv_interval_prob(v_[p], hp_.alpha, gw_, n_row(pr.j));
    for (int k = 0; k < slots; ++k)
      for (int l = 0; l < slots; ++l) {
        const double pe = predictive_edge_prob(counts_, hp_, k, l);
        w[k * slots + l] = ai[k] * aj[l] * (pr.e ? pe : 1.0 - pe);
      }
  }

  int k = 0, l = 0;
  sample_cell(w, slots, &k, &l);
  if (k == K || l == K) instantiate_new_community();
  counts_.add(pr.i, pr.j, k, l, pr.e, true);
  k = std::min(k, counts_.K() - 1);
  l = std::min(l, counts_.K() - 1);
  s_[p] = k;
  r_[p] = l;
}

void GibbsSampler::resample_pi_node(int i) {
  // Conjugate draw from the count posterior. The copulas reshape how the
  // indicators partition each membership row, but the row itself keeps its
  // Dirichlet form because the copula margins are the memberships.
  if (cfg_.variant != Variant::pi) return;
  const int K = counts_.K();
  std::vector<double> w;
  w.reserve(gw_.beta.size());
  for (int k = 0; k < K; ++k)
    w.push_back(std::max(hp_.alpha * gw_.beta[k] + counts_.N(i, k), 1e-12));
  if (hdp_) w.push_back(std::max(hp_.alpha * gw_.beta[K], 1e-12));
  pi_[i] = rng_.dirichlet(w);
}

void GibbsSampler::resample_beta() {
  if (!hdp_ || cfg_.fixed_beta) return;
  const int K = counts_.K();
  std::vector<double> t(K + 1, 0.0);
  t[K] = hp_.gamma;
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < K; ++k) {
      const int c = counts_.N(i, k);
      if (c == 0) continue;
      const double ab = hp_.alpha * gw_.beta[k];
      int tables = 0;
      for (int j = 0; j < c; ++j)
        if (rng_.uniform() < ab / (ab + j)) ++tables;
      t[k] += tables;
    }
  gw_.beta = rng_.dirichlet(t);
}

std::pair<double, double> GibbsSampler::sample_pair_in_cell(
    int p, const CopulaSpec& spec) {
  const PairObs& pr = pairs_[p];
  const auto& pi_i = pi_[pr.i];
  const auto& pi_j = pi_[pr.j];
  const int k = s_[p], l = r_[p];
  double u_lo = 0.0, v_lo = 0.0;
  for (int q = 0; q < k; ++q) u_lo += pi_i[q];
  for (int q = 0; q < l; ++q) v_lo += pi_j[q];
  u_lo = std::min(u_lo, 1.0);
  v_lo = std::min(v_lo, 1.0);
  const double u_hi = (k + 1 == static_cast<int>(pi_i.size()))
                          ? 1.0
                          : std::min(u_lo + pi_i[k], 1.0);
  const double v_hi = (l + 1 == static_cast<int>(pi_j.size()))
                          ? 1.0
                          : std::min(v_lo + pi_j[l], 1.0);
  auto [u, v] = sample_pair_in_rectangle(
      spec, std::max(u_lo, 1e-12), std::max(u_hi, 2e-12),
      std::max(v_lo, 1e-12), std::max(v_hi, 2e-12), rng_);
  return {std::clamp(u, 1e-12, 1.0 - 1e-12),
          std::clamp(v, 1e-12, 1.0 - 1e-12)};
}

void GibbsSampler::resample_copula_theta(int d) {
  CopulaSpec& sp = specs_[d - 1];
  if (sp.family == CopulaFamily::independence) return;
  const auto& members = bygroup_[d];
  if (members.empty()) {
    sp.theta = sample_theta_prior(sp, rng_);
    return;
  }
  // Work with explicit copula coordinates: the uv variant keeps them in its
  // state, the pi variant draws them from the copula restricted to each
  // pair's current stick rectangle. theta then sees the copula density at
  // those points.
  std::vector<std::pair<double, double>> uv;
  uv.reserve(members.size());
  if (cfg_.variant == Variant::pi) {
    for (int p : members) uv.push_back(sample_pair_in_cell(p, sp));
  } else {
    // Refresh against the current counts: the coordinates stored by the pair
    // sweep were drawn against counts that other pairs have since moved.
    for (int p : members) {
      draw_uv_given_cell(p, s_[p], r_[p]);
      uv.push_back({u_[p], v_[p]});
    }
  }
  const double cur = sp.theta;
  const double cand = propose_theta(sp, cur, rng_);
  double lp_new = theta_log_prior(sp, cand);
  if (std::isfinite(lp_new)) {
    lp_new += theta_transform_log_jacobian(sp, cand);
    const CopulaSpec cand_spec = sp.with_theta(cand);
    for (auto [u, v] : uv) lp_new += copula_log_density(cand_spec, u, v);
  }
  double lp_old =
      theta_log_prior(sp, cur) + theta_transform_log_jacobian(sp, cur);
  for (auto [u, v] : uv) lp_old += copula_log_density(sp, u, v);
  bool accept;
  if (!std::isfinite(lp_old) && !std::isfinite(lp_new))
    accept = false;
  else if (!std::isfinite(lp_old))
    accept = true;
  else
    accept = std::log(rng_.uniform()) < lp_new - lp_old;
  if (accept) sp.theta = cand;
}

void GibbsSampler::refresh_edges(RngStream& rng) {
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    PairObs& pr = pairs_[p];
    counts_.remove(pr.i, pr.j, s_[p], r_[p], pr.e);
    const double pe = predictive_edge_prob(counts_, hp_, s_[p], r_[p]);
    pr.e = rng.uniform() < pe ? 1 : 0;
    counts_.add(pr.i, pr.j, s_[p], r_[p], pr.e, false);
  }
}

long long GibbsSampler::edge_total() const {
  long long t = 0;
  for (const auto& pr : pairs_) t += pr.e;
  return t;
}

void GibbsSampler::sweep() {
  rng_.shuffle(order_);
  for (int p : order_) update_pair(p);
  resample_beta();
  if (cfg_.variant == Variant::pi)
    for (int i = 0; i < n_; ++i) resample_pi_node(i);
  if (cfg_.resample_theta)
    for (int d = 1; d < static_cast<int>(bygroup_.size()); ++d)
      resample_copula_theta(d);
}

double GibbsSampler::current_prediction(int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
    throw std::invalid_argument("current_prediction: bad cell");
  const int p = pair_index_(i, j);
  if (p >= 0) return predictive_edge_prob(counts_, hp_, s_[p], r_[p]);
  const int d = sg_label_(i, j);
  const CopulaSpec* sp = spec_of(d);
  const int K = counts_.K();
  const int slots = K + (hdp_ && !cfg_.fixed_beta ? 1 : 0);
  double acc = 0.0;
  if (cfg_.variant == Variant::pi) {
    const auto table = pi_rectangle_table(sp, pi_[i], pi_[j]);
    for (int k = 0; k < slots; ++k)
      for (int l = 0; l < slots; ++l)
        acc += table(k, l) * predictive_edge_prob(counts_, hp_, k, l);
  } else {
    auto [u, v] = sample_pair(sp ? *sp : independence_spec(), rng_);
    const auto ai = uv_interval_prob(u, hp_.alpha, gw_, n_row(i));
    const auto aj = uv_interval_prob(v, hp_.alpha, gw_, n_row(j));
    for (int k = 0; k < slots; ++k)
      for (int l = 0; l < slots; ++l)
        acc += ai[k] * aj[l] * predictive_edge_prob(counts_, hp_, k, l);
  }
  return acc;
}

void GibbsSampler::accumulate_predictive(Trace& tr) {
  for (std::size_t p = 0; p < pairs_.size(); ++p)
    tr.predictive_sum(pairs_[p].i, pairs_[p].j) +=
        predictive_edge_prob(counts_, hp_, s_[p], r_[p]);
  for (auto [i, j] : missing_)
    tr.predictive_sum(i, j) += current_prediction(i, j);
  tr.predictive_samples += 1;
}

Trace GibbsSampler::run() {
  Trace tr;
  tr.n = n_;
  tr.seed = cfg_.seed;
  tr.predictive_sum = Grid<double>(n_, n_, 0.0);
  const int burn =
      static_cast<int>(cfg_.iterations * cfg_.burn_in_fraction);
  for (int it = 0; it < cfg_.iterations; ++it) {
    sweep();
    TraceIter ti;
    ti.K = counts_.K();
    ti.loglik = collapsed_edge_loglik(counts_, hp_);
    for (std::size_t d = 0; d < specs_.size(); ++d)
      ti.theta.push_back(specs_[d].theta);
    tr.iters.push_back(std::move(ti));
    if (it >= burn) accumulate_predictive(tr);
  }
  return tr;
}

Trace run_chain(const InteractionMatrix& data, const SubgroupMap& subgroups,
                const ChainConfig& cfg) {
  GibbsSampler sampler(data, subgroups, cfg);
  return sampler.run();
}

}  // namespace cmmsb
