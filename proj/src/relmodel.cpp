#include "cmmsb/relmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmmsb {

void Hyperparams::validate() const {
  if (!(alpha > 0.0) || !(gamma > 0.0) || !(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw std::invalid_argument("Hyperparams: all must be strictly positive");
}

InteractionMatrix::InteractionMatrix(int n) : n_(n), e_(n, n, -1) {
  if (n <= 0) throw std::invalid_argument("InteractionMatrix: n must be > 0");
}

void InteractionMatrix::set(int i, int j, int value) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw std::out_of_range("InteractionMatrix::set: index");
  if (value < -1 || value > 1)
    throw std::invalid_argument("InteractionMatrix::set: value not in {-1,0,1}");
  if (i == j && value != -1)
    throw std::invalid_argument("InteractionMatrix::set: diagonal is excluded");
  e_(i, j) = static_cast<std::int8_t>(value);
}

InteractionMatrix InteractionMatrix::masked(
    const std::vector<std::pair<int, int>>& cells) const {
  InteractionMatrix out = *this;
  for (auto [i, j] : cells) out.set(i, j, -1);
  return out;
}

int InteractionMatrix::observed_count() const {
  int c = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (observed(i, j)) ++c;
  return c;
}

SubgroupMap::SubgroupMap(int n, int subgroup_count)
    : n_(n), d_(subgroup_count), g_(n, n, 0) {
  if (n <= 0) throw std::invalid_argument("SubgroupMap: n must be > 0");
  if (subgroup_count < 0)
    throw std::invalid_argument("SubgroupMap: negative subgroup count");
}

void SubgroupMap::set(int i, int j, int d) {
  if (d < 0 || d > d_)
    throw std::invalid_argument("SubgroupMap::set: label outside {0..D}");
  g_.at(i, j) = d;
}

void GlobalWeights::validate() const {
  if (beta.empty()) throw std::invalid_argument("GlobalWeights: empty beta");
  double s = 0.0;
  for (double b : beta) {
    if (!(b >= 0.0)) throw std::invalid_argument("GlobalWeights: negative entry");
    s += b;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("GlobalWeights: beta must sum to 1");
}

CountState::CountState(int n, int K)
    : n_(n), K_(K), N_(n, K, 0), m1_(K, K, 0), m0_(K, K, 0),
      node_total_(n, 0), comm_total_(K, 0) {
  if (n <= 0 || K < 0) throw std::invalid_argument("CountState: bad shape");
}

void CountState::grow() {
  Grid<std::int32_t> N2(n_, K_ + 1, 0), m1b(K_ + 1, K_ + 1, 0),
      m0b(K_ + 1, K_ + 1, 0);
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < K_; ++k) N2(i, k) = N_(i, k);
  for (int k = 0; k < K_; ++k)
    for (int l = 0; l < K_; ++l) {
      m1b(k, l) = m1_(k, l);
      m0b(k, l) = m0_(k, l);
    }
  N_ = std::move(N2);
  m1_ = std::move(m1b);
  m0_ = std::move(m0b);
  comm_total_.push_back(0);
  ++K_;
}

void CountState::add(int i, int j, int k, int l, int e, bool allow_growth) {
  if (e != 0 && e != 1) throw std::invalid_argument("CountState::add: bad e");
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_)
    throw std::invalid_argument("CountState::add: bad pair");
  const int limit = allow_growth ? K_ + 1 : K_;
  if (k < 0 || l < 0 || k >= limit || l >= limit)
    throw std::invalid_argument("CountState::add: community out of range");
  if (k >= K_ || l >= K_) {
    grow();  // one shared new community for any index == old K
    k = std::min(k, K_ - 1);
    l = std::min(l, K_ - 1);
  }
  N_(i, k) += 1;
  N_(j, l) += 1;
  (e ? m1_ : m0_)(k, l) += 1;
  node_total_[i] += 1;
  node_total_[j] += 1;
  comm_total_[k] += 1;
  comm_total_[l] += 1;
  pair_total_ += 1;
}

void CountState::remove(int i, int j, int k, int l, int e) {
  if (k < 0 || l < 0 || k >= K_ || l >= K_)
    throw consistency_error("CountState::remove: community out of range");
  auto& m = (e ? m1_ : m0_);
  if (N_(i, k) <= 0 || N_(j, l) <= 0 || m(k, l) <= 0)
    throw consistency_error("CountState::remove: pair not currently assigned");
  N_(i, k) -= 1;
  N_(j, l) -= 1;
  m(k, l) -= 1;
  node_total_[i] -= 1;
  node_total_[j] -= 1;
  comm_total_[k] -= 1;
  comm_total_[l] -= 1;
  pair_total_ -= 1;
}

void CountState::drop_community(int k) {
  Grid<std::int32_t> N2(n_, K_ - 1, 0), m1b(K_ - 1, K_ - 1, 0),
      m0b(K_ - 1, K_ - 1, 0);
  for (int i = 0; i < n_; ++i)
    for (int q = 0, t = 0; q < K_; ++q)
      if (q != k) N2(i, t++) = N_(i, q);
  for (int q = 0, tq = 0; q < K_; ++q) {
    if (q == k) continue;
    for (int r = 0, tr = 0; r < K_; ++r) {
      if (r == k) continue;
      m1b(tq, tr) = m1_(q, r);
      m0b(tq, tr) = m0_(q, r);
      ++tr;
    }
    ++tq;
  }
  N_ = std::move(N2);
  m1_ = std::move(m1b);
  m0_ = std::move(m0b);
  comm_total_.erase(comm_total_.begin() + k);
  --K_;
}

std::vector<int> CountState::compact_empty() {
  std::vector<int> removed;
  for (int k = K_ - 1; k >= 0; --k) {
    if (comm_total_[k] == 0) {
      // m rows/cols must already be empty when no indicator uses k.
      drop_community(k);
      removed.push_back(k);
    }
  }
  return removed;
}

double collapsed_edge_loglik(const CountState& counts, const Hyperparams& hp) {
  hp.validate();
  const double base = ln_beta(hp.lambda1, hp.lambda2);
  double ll = 0.0;
  for (int k = 0; k < counts.K(); ++k)
    for (int l = 0; l < counts.K(); ++l) {
      const int a = counts.m1(k, l), b = counts.m0(k, l);
      if (a == 0 && b == 0) continue;
      ll += ln_beta(a + hp.lambda1, b + hp.lambda2) - base;
    }
  return ll;
}

double predictive_edge_prob(const CountState& counts, const Hyperparams& hp,
                            int k, int l, std::optional<int> exclude_e) {
  double a = 0.0, b = 0.0;
  if (k >= 0 && l >= 0 && k < counts.K() && l < counts.K()) {
    a = counts.m1(k, l);
    b = counts.m0(k, l);
  }
  if (exclude_e) {
    (*exclude_e ? a : b) -= 1.0;
    if (a < 0.0 || b < 0.0)
      throw consistency_error("predictive_edge_prob: exclusion underflow");
  }
  return (a + hp.lambda1) / (a + b + hp.lambda1 + hp.lambda2);
}

int stick_invert(const std::vector<double>& pi, double u) {
  if (pi.empty()) throw std::invalid_argument("stick_invert: empty simplex");
  double cum = 0.0;
  int last_nonzero = 0;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    cum += pi[k];
    if (pi[k] > 0.0) last_nonzero = static_cast<int>(k);
    if (cum >= u) return static_cast<int>(k);
  }
  return last_nonzero;  // u above the (rounded) total mass
}

}  // namespace cmmsb
