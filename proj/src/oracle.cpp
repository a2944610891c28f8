#include "duet/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace duet::oracle {

OuMoments ou_moments(double r0, double t) {
  if (t < 0.0) throw std::domain_error("ou_moments: t must be >= 0");
  const double decay = std::exp(-t);
  return {r0 * decay, 0.5 * (1.0 - decay * decay)};
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double half_normal_cdf(double x, double t) {
  if (!(t > 0.0)) throw std::domain_error("half_normal_cdf: t must be > 0");
  if (x < 0.0) return 0.0;
  return 2.0 * normal_cdf(x / std::sqrt(t)) - 1.0;
}

std::vector<double> sample_reflected_bm(std::span<const double> t_grid,
                                        rng::GaussianStream& noise) {
  std::vector<double> path;
  path.reserve(t_grid.size());
  if (t_grid.empty()) return path;
  if (t_grid[0] != 0.0) {
    throw std::invalid_argument("sample_reflected_bm: grid must start at 0");
  }
  double w = 0.0;
  path.push_back(0.0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    if (!(dt > 0.0)) {
      throw std::invalid_argument("sample_reflected_bm: grid must be increasing");
    }
    w += std::sqrt(dt) * noise.next_gaussian();
    path.push_back(std::fabs(w));
  }
  return path;
}

double doob_bound(double t, double T, double D) {
  if (!(t > 0.0 && T > 0.0 && D > 0.0)) {
    throw std::domain_error("doob_bound: t, T, D must be > 0");
  }
  const double b = 18.0 * t * T * D * std::exp(-(D - 1.0) * (D - 1.0));
  return std::min(1.0, b);
}

double exit_ode_u(double x, double a) {
  if (!(x >= 0.0 && x <= a)) {
    throw std::domain_error("exit_ode_u: x must satisfy 0 <= x <= a (x = " +
                            std::to_string(x) + ", a = " + std::to_string(a) + ")");
  }
  // grouped so that u(a) evaluates to exactly zero
  return 0.5 * (std::exp(2.0 * a) - std::exp(2.0 * x)) - (a - x);
}

namespace {

double integrand(double y) { return std::exp(y * y); }

// Adaptive Simpson with one level of subdivision per call.
double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = integrand(lm), frm = integrand(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double doob_martingale_f(double x) {
  if (!(std::fabs(x) <= 10.0)) {
    throw std::domain_error("doob_martingale_f: |x| must be <= 10");
  }
  const double hi = std::fabs(x);
  if (hi == 0.0) return 0.0;
  const double fa = integrand(0.0), fb = integrand(hi);
  const double fm = integrand(0.5 * hi);
  const double whole = hi / 6.0 * (fa + 4.0 * fm + fb);
  // relative tolerance anchored at the crude estimate
  const double tol = 1e-12 * std::fabs(whole);
  const double value = adaptive_simpson(0.0, hi, fa, fm, fb, whole, tol, 48);
  return (x < 0.0) ? -value : value;
}

double bm_exit_mean(double x, double a, double b) {
  if (!(a <= x && x <= b)) throw std::domain_error("bm_exit_mean: need a <= x <= b");
  return (x - a) * (b - x);
}

double bm_lower_exit_prob(double x, double a, double b) {
  if (!(a <= x && x <= b) || !(a < b)) {
    throw std::domain_error("bm_lower_exit_prob: need a <= x <= b, a < b");
  }
  return (b - x) / (b - a);
}

}  // namespace duet::oracle
