#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cmmsb {

// Seeded, counter-free random stream (xoshiro256** state, splitmix64 seeding).
// Identical (seed, stream) always yields the identical draw sequence; distinct
// stream ids give unrelated sequences, so concurrent chains each own one.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  // the n used here (shuffles over <= n^2 pairs), but use Lemire reduction.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n == 0");
    // 128-bit multiply-shift.
    unsigned __int128 m =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(m >> 64);
  }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double exponential() { return -std::log(uniform()); }

  // Marsaglia-Tsang squeeze; shape < 1 handled by the boosting identity.
  double gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
      throw std::domain_error("gamma: shape must be positive");
    if (shape < 1.0) {
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
      throw std::domain_error("beta: parameters must be positive");
    const double x = gamma(a);
    const double y = gamma(b);
    const double s = x + y;
    if (s <= 0.0) return 0.5;  // both shapes tiny; draws underflowed
    return x / s;
  }

  std::vector<double> dirichlet(const std::vector<double>& weights) {
    if (weights.empty())
      throw std::domain_error("dirichlet: empty weight vector");
    std::vector<double> out(weights.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      out[k] = gamma(weights[k]);
      sum += out[k];
    }
    if (sum <= 0.0) {
      // All gamma draws underflowed (every weight tiny): fall back to the
      // largest weight taking all mass.
      std::size_t arg = 0;
      for (std::size_t k = 1; k < weights.size(); ++k)
        if (weights[k] > weights[arg]) arg = k;
      for (auto& x : out) x = 0.0;
      out[arg] = 1.0;
      return out;
    }
    for (auto& x : out) x /= sum;
    return out;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace cmmsb
