#ifndef DUET_ORACLE_HPP
#define DUET_ORACLE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "duet/rng.hpp"

// Closed-form reference quantities used as ground truth by the statistical
// checks: OU moments, the half-normal law, exact reflected-Brownian-motion
// sampling, explicit bound functions and the exit ODE solution.

namespace duet::oracle {

struct OuMoments {
  double mean;
  double variance;
};

// Law of the OU process dr = -r dt + dW at time t from r(0) = r0:
// N(r0 e^{-t}, (1 - e^{-2t})/2).
OuMoments ou_moments(double r0, double t);

// Standard normal CDF, absolute error below 1e-15.
double normal_cdf(double x);

// CDF of |N(0, t)| (t is the variance): 2 Phi(x/sqrt(t)) - 1 for x >= 0.
double half_normal_cdf(double x, double t);

struct HalfNormalLaw {
  double t;  // variance parameter, > 0
  double cdf(double x) const { return half_normal_cdf(x, t); }
};

// |W| on the given grid, with W sampled exactly (independent Gaussian
// increments, no discretization error). Grid must be increasing from 0.
std::vector<double> sample_reflected_bm(std::span<const double> t_grid,
                                        rng::GaussianStream& noise);

// min(1, 18 t T D e^{-(D-1)^2}) — the tail bound for the running sup of |r2|.
double doob_bound(double t, double T, double D);

// u(x) = -e^{2x}/2 + x + e^{2a}/2 - a, the solution of u''/2 - u' = -1 with
// u'(0) = u(a) = 0; domain 0 <= x <= a.
double exit_ode_u(double x, double a);

// f(x) = int_0^x e^{y^2} dy, |x| <= 10, relative error <= 1e-10.
double doob_martingale_f(double x);

// Scale-function facts for driftless Brownian motion on [a, b] from x:
// expected exit time and probability of leaving through the lower end.
double bm_exit_mean(double x, double a, double b);
double bm_lower_exit_prob(double x, double a, double b);

}  // namespace duet::oracle

#endif  // DUET_ORACLE_HPP
