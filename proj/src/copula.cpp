#include "cmmsb/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cmmsb/special.hpp"

namespace cmmsb {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamp_unit_open(double x) {
  return std::clamp(x, 1e-300, 1.0 - 1e-16);
}

// Positive stable draw with Laplace transform exp(-t^a), a in (0,1).
// Chambers-Mallows-Stuck with skew 1.
double positive_stable(double a, RngStream& rng) {
  const double th = (rng.uniform() - 0.5) * kPi;  // (-pi/2, pi/2)
  const double w = rng.exponential();
  const double t0 = kPi / 2.0;
  const double s = std::sin(a * (th + t0)) / std::pow(std::cos(th), 1.0 / a) *
                   std::pow(std::cos(th - a * (th + t0)) / w, (1.0 - a) / a);
  return s;
}

void check_unit(double u, double v) {
  if (!(u >= 0.0) || !(u <= 1.0) || !(v >= 0.0) || !(v <= 1.0))
    throw std::domain_error("copula_cdf: (u,v) outside the unit square");
}

}  // namespace

std::string to_string(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::independence: return "independence";
    case CopulaFamily::gumbel: return "gumbel";
    case CopulaFamily::gaussian: return "gaussian";
  }
  return "?";
}

CopulaFamily copula_family_from_string(const std::string& s) {
  if (s == "independence") return CopulaFamily::independence;
  if (s == "gumbel") return CopulaFamily::gumbel;
  if (s == "gaussian") return CopulaFamily::gaussian;
  throw std::invalid_argument("unknown copula family: " + s);
}

void CopulaSpec::validate() const {
  if (proposal_scale < 0.0)
    throw std::invalid_argument("CopulaSpec: proposal_scale must be >= 0");
  switch (family) {
    case CopulaFamily::independence:
      if (theta != 0.0)
        throw std::invalid_argument(
            "CopulaSpec: independence family takes no theta");
      break;
    case CopulaFamily::gumbel:
      if (!(theta >= 1.0) || !std::isfinite(theta))
        throw std::invalid_argument("CopulaSpec: Gumbel theta must be >= 1");
      if (!(prior_rate > 0.0))
        throw std::invalid_argument("CopulaSpec: prior_rate must be > 0");
      break;
    case CopulaFamily::gaussian:
      if (!(theta > -1.0) || !(theta < 1.0))
        throw std::invalid_argument(
            "CopulaSpec: Gaussian theta must be in (-1,1)");
      break;
  }
}

double copula_cdf(const CopulaSpec& spec, double u, double v) {
  check_unit(u, v);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  switch (spec.family) {
    case CopulaFamily::independence:
      return u * v;
    case CopulaFamily::gumbel: {
      const double th = spec.theta;
      const double x = -std::log(u), y = -std::log(v);
      const double s = std::pow(x, th) + std::pow(y, th);
      return std::exp(-std::pow(s, 1.0 / th));
    }
    case CopulaFamily::gaussian:
      return bvn_cdf(norm_quantile(u), norm_quantile(v), spec.theta);
  }
  throw std::logic_error("copula_cdf: bad family");
}

double rectangle_mass(const CopulaSpec& spec, double u_lo, double u_hi,
                      double v_lo, double v_hi) {
  if (!(u_lo <= u_hi) || !(v_lo <= v_hi))
    throw std::domain_error("rectangle_mass: inverted bounds");
  const double m = copula_cdf(spec, u_hi, v_hi) + copula_cdf(spec, u_lo, v_lo) -
                   copula_cdf(spec, u_hi, v_lo) - copula_cdf(spec, u_lo, v_hi);
  if (m < 0.0) {
    if (m < -1e-12)
      throw consistency_error("rectangle_mass: negative mass beyond round-off");
    return 0.0;
  }
  return std::min(m, 1.0);
}

std::pair<double, double> sample_pair(const CopulaSpec& spec, RngStream& rng) {
  spec.validate();
  switch (spec.family) {
    case CopulaFamily::independence:
      return {rng.uniform(), rng.uniform()};
    case CopulaFamily::gumbel: {
      if (spec.theta == 1.0) return {rng.uniform(), rng.uniform()};
      const double a = 1.0 / spec.theta;
      const double s = positive_stable(a, rng);
      const double e1 = rng.exponential();
      const double e2 = rng.exponential();
      const double u = std::exp(-std::pow(e1 / s, a));
      const double v = std::exp(-std::pow(e2 / s, a));
      return {clamp_unit_open(u), clamp_unit_open(v)};
    }
    case CopulaFamily::gaussian: {
      const double rho = spec.theta;
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double w = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
      return {clamp_unit_open(norm_cdf(z1)), clamp_unit_open(norm_cdf(w))};
    }
  }
  throw std::logic_error("sample_pair: bad family");
}

std::pair<double, double> sample_pair_in_rectangle(const CopulaSpec& spec,
                                                   double u_lo, double u_hi,
                                                   double v_lo, double v_hi,
                                                   RngStream& rng) {
  if (!(u_lo <= u_hi) || !(v_lo <= v_hi))
    throw std::domain_error("sample_pair_in_rectangle: inverted bounds");
  if (spec.family == CopulaFamily::independence ||
      (spec.family == CopulaFamily::gumbel && spec.theta == 1.0)) {
    return {u_lo + rng.uniform() * (u_hi - u_lo),
            v_lo + rng.uniform() * (v_hi - v_lo)};
  }
  const double mass = rectangle_mass(spec, u_lo, u_hi, v_lo, v_hi);
  if (mass > 1e-3) {
    for (int t = 0; t < 256; ++t) {
      const auto [u, v] = sample_pair(spec, rng);
      if (u >= u_lo && u <= u_hi && v >= v_lo && v <= v_hi) return {u, v};
    }
  }
  // Mass-weighted bisection: halve the longer side, descend into a half with
  // probability proportional to its copula mass. ~50 levels pins the point to
  // floating-point resolution, and every draw is exact. Deep cells lose all
  // significant digits in the four-CDF difference, so negatives are clamped
  // here instead of rejected.
  const auto cell_mass = [&spec](double a, double b, double c, double d) {
    const double m = copula_cdf(spec, b, d) + copula_cdf(spec, a, c) -
                     copula_cdf(spec, b, c) - copula_cdf(spec, a, d);
    return std::max(m, 0.0);
  };
  double a = u_lo, b = u_hi, c = v_lo, d = v_hi;
  for (int lvl = 0; lvl < 100 && (b - a > 1e-15 || d - c > 1e-15); ++lvl) {
    if (b - a >= d - c) {
      const double m = 0.5 * (a + b);
      const double left = cell_mass(a, m, c, d);
      const double right = cell_mass(m, b, c, d);
      const double tot = left + right;
      if (tot <= 0.0) {
        // Mass below round-off everywhere: fall back to a uniform split.
        if (rng.uniform() < 0.5) b = m; else a = m;
      } else if (rng.uniform() * tot < left) {
        b = m;
      } else {
        a = m;
      }
    } else {
      const double m = 0.5 * (c + d);
      const double bot = cell_mass(a, b, c, m);
      const double top = cell_mass(a, b, m, d);
      const double tot = bot + top;
      if (tot <= 0.0) {
        if (rng.uniform() < 0.5) d = m; else c = m;
      } else if (rng.uniform() * tot < bot) {
        d = m;
      } else {
        c = m;
      }
    }
  }
  return {clamp_unit_open(0.5 * (a + b)), clamp_unit_open(0.5 * (c + d))};
}

double copula_log_density(const CopulaSpec& spec, double u, double v) {
  check_unit(u, v);
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gumbel: {
      const double th = spec.theta;
      if (th == 1.0) return 0.0;
      const double x = -std::log(u), y = -std::log(v);
      const double s = std::pow(x, th) + std::pow(y, th);
      const double a = std::pow(s, 1.0 / th);
      return -a + (th - 1.0) * (std::log(x) + std::log(y)) + x + y +
             (2.0 / th - 2.0) * std::log(s) + std::log1p((th - 1.0) / a);
    }
    case CopulaFamily::gaussian: {
      const double r = spec.theta;
      const double a = norm_quantile(u), b = norm_quantile(v);
      const double q = 1.0 - r * r;
      return -0.5 * std::log(q) -
             (r * r * (a * a + b * b) - 2.0 * r * a * b) / (2.0 * q);
    }
  }
  throw std::logic_error("copula_log_density: bad family");
}

double propose_theta(const CopulaSpec& spec, double current, RngStream& rng) {
  const double step = spec.proposal_scale * rng.normal();
  switch (spec.family) {
    case CopulaFamily::independence:
      return current;
    case CopulaFamily::gumbel: {
      const double x = std::log(std::max(current - 1.0, 1e-300));
      return 1.0 + std::exp(x + step);
    }
    case CopulaFamily::gaussian: {
      const double x = std::atanh(current);
      return std::tanh(x + step);
    }
  }
  throw std::logic_error("propose_theta: bad family");
}

double theta_log_prior(const CopulaSpec& spec, double theta) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gumbel:
      if (!(theta >= 1.0)) return neg_inf;
      return std::log(spec.prior_rate) - spec.prior_rate * (theta - 1.0);
    case CopulaFamily::gaussian:
      if (!(theta > -1.0 && theta < 1.0)) return neg_inf;
      return std::log(0.5);
  }
  throw std::logic_error("theta_log_prior: bad family");
}

double theta_transform_log_jacobian(const CopulaSpec& spec, double theta) {
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gumbel:
      return std::log(std::max(theta - 1.0, 1e-300));
    case CopulaFamily::gaussian:
      return std::log(std::max(1.0 - theta * theta, 1e-300));
  }
  throw std::logic_error("theta_transform_log_jacobian: bad family");
}

double sample_theta_prior(const CopulaSpec& spec, RngStream& rng) {
  switch (spec.family) {
    case CopulaFamily::independence:
      return 0.0;
    case CopulaFamily::gumbel:
      return 1.0 + rng.exponential() / spec.prior_rate;
    case CopulaFamily::gaussian:
      return 2.0 * rng.uniform() - 1.0;
  }
  throw std::logic_error("sample_theta_prior: bad family");
}

}  // namespace cmmsb
