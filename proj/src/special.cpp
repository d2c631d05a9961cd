#include "cmmsb/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace cmmsb {

double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("ln_gamma: x must be a positive finite real");
  return std::lgamma(x);
}

double ln_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("ln_beta: parameters must be positive");
  return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

double reg_inc_beta(double u, double a, double b) {
  if (!(u >= 0.0) || !(u <= 1.0))
    throw std::domain_error("reg_inc_beta: u outside [0,1]");
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("reg_inc_beta: parameters must be positive");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  return boost::math::ibeta(a, b, u);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("norm_quantile: p outside (0,1)");
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, p);
}

namespace {

// Integrand of the Drezner-Wesolowsky identity after the t = sin(phi)
// substitution, which removes the 1/sqrt(1-t^2) factor.
double dw_integrand(double phi, double a, double b) {
  const double c = std::cos(phi);
  const double arg = (a * a + b * b - 2.0 * a * b * std::sin(phi)) / (2.0 * c * c);
  return std::exp(-arg);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, double xa,
                        double xb, double ca, double cb) {
  const double m = 0.5 * (xa + xb);
  const double lm = 0.5 * (xa + m), rm = 0.5 * (m + xb);
  const double flm = dw_integrand(lm, ca, cb);
  const double frm = dw_integrand(rm, ca, cb);
  const double h = xb - xa;
  const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, b, fa, flm, fm, left, tol * 0.5, depth - 1, xa, m,
                          ca, cb) +
         adaptive_simpson(a, b, fm, frm, fb, right, tol * 0.5, depth - 1, m, xb,
                          ca, cb);
}

}  // namespace

double bvn_cdf(double x, double y, double rho) {
  if (!(rho >= -1.0) || !(rho <= 1.0))
    throw std::domain_error("bvn_cdf: rho outside [-1,1]");
  if (std::isinf(x) || std::isinf(y)) {
    if (x < 0 || y < 0) return 0.0;  // either margin at -inf
    if (std::isinf(x) && std::isinf(y)) return 1.0;
    return std::isinf(x) ? norm_cdf(y) : norm_cdf(x);
  }
  if (rho == 1.0) return norm_cdf(std::min(x, y));
  if (rho == -1.0) return std::max(0.0, norm_cdf(x) + norm_cdf(y) - 1.0);
  const double base = norm_cdf(x) * norm_cdf(y);
  if (rho == 0.0) return base;

  const double upper = std::asin(rho);
  const double f0 = dw_integrand(0.0, x, y);
  const double f1 = dw_integrand(upper, x, y);
  const double fm = dw_integrand(0.5 * upper, x, y);
  const double whole = (upper / 6.0) * (f0 + 4.0 * fm + f1);
  const double integral = adaptive_simpson(0.0, upper, f0, fm, f1, whole, 1e-12,
                                           40, 0.0, upper, x, y);
  const double v = base + integral / (2.0 * 3.14159265358979323846);
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace cmmsb
