#pragma once

#include <stdexcept>

namespace cmmsb {

// Raised when incremental state or numerical identities are violated beyond
// tolerance (maps to CLI exit code 3).
class consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// log Gamma(x), x > 0.
double ln_gamma(double x);

// log B(a,b), a,b > 0.
double ln_beta(double a, double b);

// Regularized incomplete beta I_u(a,b), u in [0,1], a,b > 0.
double reg_inc_beta(double u, double a, double b);

// Standard normal CDF and its inverse.
double norm_cdf(double x);
double norm_quantile(double p);

// P(X <= x, Y <= y) for standard bivariate normal with correlation rho.
double bvn_cdf(double x, double y, double rho);

}  // namespace cmmsb
