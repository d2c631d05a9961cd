#pragma once

#include <string>
#include <utility>

#include "cmmsb/rng.hpp"

namespace cmmsb {

enum class CopulaFamily { independence, gumbel, gaussian };

std::string to_string(CopulaFamily f);
CopulaFamily copula_family_from_string(const std::string& s);

// One subgroup's copula: family, current parameter, and the settings of its
// random-walk parameter move. Gumbel theta lives in [1,inf) with prior
// theta-1 ~ Exponential(prior_rate); Gaussian theta in (-1,1) with a uniform
// prior; the independence family carries no parameter.
struct CopulaSpec {
  CopulaFamily family = CopulaFamily::independence;
  double theta = 0.0;
  double proposal_scale = 0.25;
  double prior_rate = 0.5;  // Gumbel only

  void validate() const;
  CopulaSpec with_theta(double t) const {
    CopulaSpec s = *this;
    s.theta = t;
    return s;
  }
};

// C(u,v) on [0,1]^2.
double copula_cdf(const CopulaSpec& spec, double u, double v);

// C(u_hi,v_hi) + C(u_lo,v_lo) - C(u_hi,v_lo) - C(u_lo,v_hi). Negative
// round-off below 1e-12 in magnitude is clamped to zero; anything more
// negative raises consistency_error.
double rectangle_mass(const CopulaSpec& spec, double u_lo, double u_hi,
                      double v_lo, double v_hi);

// One (u,v) draw with joint CDF copula_cdf and uniform margins.
std::pair<double, double> sample_pair(const CopulaSpec& spec, RngStream& rng);

// One (u,v) draw from the copula conditioned on landing inside the given
// rectangle. Rejection from the unconstrained copula while the acceptance
// rate is decent, otherwise recursive mass-weighted bisection of the
// rectangle, which is exact to floating-point resolution for any copula with
// a computable CDF.
std::pair<double, double> sample_pair_in_rectangle(const CopulaSpec& spec,
                                                   double u_lo, double u_hi,
                                                   double v_lo, double v_hi,
                                                   RngStream& rng);

// log copula density c(u,v); zero for the independence family.
double copula_log_density(const CopulaSpec& spec, double u, double v);

// Symmetric random walk on the unconstrained transform of theta
// (log(theta-1) for Gumbel, atanh(theta) for Gaussian).
double propose_theta(const CopulaSpec& spec, double current, RngStream& rng);

// log prior density of theta (in theta space); -inf outside the domain.
double theta_log_prior(const CopulaSpec& spec, double theta);

// log |d theta / d x| of the unconstrained transform, needed by MH moves
// performed in the transformed space.
double theta_transform_log_jacobian(const CopulaSpec& spec, double theta);

// One draw of theta from the prior.
double sample_theta_prior(const CopulaSpec& spec, RngStream& rng);

}  // namespace cmmsb
