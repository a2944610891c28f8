#ifndef DUET_VERIFY_HPP
#define DUET_VERIFY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "duet/model.hpp"
#include "duet/observe.hpp"
#include "duet/sde.hpp"
#include "duet/stats.hpp"

// Parallel ensemble estimators for the quantitative checks. Every estimator
// reports a standard error computed from the per-path sample variance; bound
// comparisons downstream are one-sided with a 4-SE statistical margin.
//
// All estimators are deterministic functions of their settings: per-path
// noise is addressed by (seed, path index), sub-ensembles derive their own
// seeds, and reductions are fixed-order.

namespace duet::verify {

struct StatRecord {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  std::size_t n_effective = 0;
};

struct BoundCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;  // value <= limit
};

struct EnsembleSummary {
  std::string experiment;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 0;
  std::string config_digest;
  double dt = 0.0;
  std::string integrator;
  std::string gaussian_method = "inverse-cdf-as241";
  std::string potential;
  std::vector<StatRecord> statistics;
  std::vector<BoundCheck> bounds;

  void add_stat(const std::string& name, double est, double se, std::size_t n) {
    statistics.push_back({name, est, se, n});
  }
  void add_stat(const std::string& name, const MeanSE& m) {
    statistics.push_back({name, m.mean, m.se, m.n});
  }
  void add_bound(const std::string& name, double value, double limit) {
    bounds.push_back({name, value, limit, value <= limit});
  }
  bool passed() const {
    for (const auto& b : bounds)
      if (!b.pass) return false;
    return true;
  }
};

// Martingale-problem test function: bounded with bounded derivatives up to
// order three and f'(0+) = 0. Only f and f'' enter the statistic.
struct MartingaleTestSpec {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> f2;
  double t = 1.0;                  // horizon in diffusive units
  std::optional<double> epsilon;   // optional stopping level for |X|
  double T = 2048.0;

  // Checks f'(0+) ~ 0 (forward difference <= 1e-6) and that f, f', f'', f'''
  // are finite on [0, 20]. Throws std::invalid_argument otherwise.
  void validate() const;
};

MartingaleTestSpec spec_gauss_bump(double t, double T);   // f(x) = exp(-x^2)
MartingaleTestSpec spec_cauchy_bump(double t, double T);  // f(x) = 1/(1+x^2)

// Trapezoidal defect f(x_N) - f(x_0) - 1/2 int f''(x_s) ds of one |X| path
// sampled at uniform diffusive spacing dt_x.
double path_defect(const MartingaleTestSpec& spec,
                   std::span<const double> abs_x, double dt_x);

// ---------------------------------------------------------------------------
// diffusive-limit ensemble (KS against the half-normal law, quadratic
// variation proxy, martingale defects)

struct LimitSettings {
  double T = 2048.0;
  double dt = 0.01;
  std::size_t n_paths = 4096;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;  // null = "cos"
  sde::Scheme scheme = sde::Scheme::kSplit;
  model::PhaseState init{};               // defaults to the origin
  bool with_defects = false;
};

struct LimitResult {
  std::vector<double> x_half, x_one;  // X at t = 1/2 and t = 1, signed
  double ks_one = 0.0;                // |X_1| against half-normal, variance 1
  double ks_half = 0.0;               // |X_1/2| against variance 1/2
  MeanSE quad_var;                    // E[(X_1 - X_1/2)^2]
  MeanSE defect_gauss, defect_cauchy;
};

LimitResult run_limit(const LimitSettings& s);

// Martingale defect on exactly sampled reflected Brownian paths.
MeanSE martingale_defect_reflected_bm(const MartingaleTestSpec& spec,
                                      std::size_t n_paths, std::uint64_t seed,
                                      unsigned workers, double dt_x);

// ---------------------------------------------------------------------------
// short-rotation expansion residuals

struct ExpansionSettings {
  std::vector<double> r_list{8, 16, 32, 64, 128, 256, 512};
  double r2_0 = 0.0;
  std::size_t n_paths = 100000;
  std::size_t steps_per_sigma = 100;  // dt = sigma/steps, must be >= 100
  std::size_t bootstrap = 100;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct ExpansionPoint {
  double R = 0.0;
  double sigma = 0.0;
  double l2_refined = 0.0, se_refined = 0.0;
  double l2_crude = 0.0, se_crude = 0.0;
};

struct ExpansionResult {
  std::vector<ExpansionPoint> points;
  double slope_refined = 0.0;  // log L2(Z - leading term) vs log sigma
  double slope_crude = 0.0;    // log L2(Z) vs log sigma
};

ExpansionResult expansion_residual(const ExpansionSettings& s);

// ---------------------------------------------------------------------------
// drift and diffusion of r1 over t(R)

struct MomentSettings {
  double R = 256.0;
  double r2_0 = 1.0;
  double alpha_t = 0.6;
  double dt = 0.0;  // 0 = auto: 1/(16 R)
  std::size_t n_paths = 20000;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct MomentResult {
  double t_R = 0.0;  // effective horizon (grid multiple)
  MeanSE drift;      // E[r1(t(R)) - r1(0)]
  MeanSE second;     // E[(r1(t(R)) - r1(0))^2]
};

MomentResult moment_drift_diffusion(const MomentSettings& s);

// ---------------------------------------------------------------------------
// decorrelation E[r2(t) V'(theta2(t) - theta0)]

struct DecorrelationSettings {
  double R = 256.0;
  double r2_0 = 2.0;
  std::vector<double> t_list{5.0, 10.0, 20.0};
  std::size_t n_theta0 = 10;
  double dt = 0.0;  // 0 = auto: 1/(16 R)
  std::size_t n_paths = 20000;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
  // fixed initial angles (theta1, theta2); unset = uniform per path
  std::optional<std::pair<double, double>> theta_init;
};

struct DecorrelationCell {
  double t = 0.0;
  double theta0 = 0.0;
  MeanSE estimate;
};

std::vector<DecorrelationCell> decorrelation(const DecorrelationSettings& s);

// Same functional on the decoupled analogue started from its invariant law.
MeanSE decorrelation_analogue(double t, double theta0, std::size_t n_paths,
                              std::uint64_t seed, unsigned workers, double dt,
                              const model::Potential* pot = nullptr);

// ---------------------------------------------------------------------------
// exit of |r1|^beta from [R^beta/2, 2 R^beta]

struct ExitSettings {
  double R = 128.0;
  double beta = 1.5;
  double alpha = 0.5;  // r2 stop at R^alpha
  double r2_0 = 0.0;
  double dt = 1e-3;
  double cap_factor = 3.0;  // horizon cap = cap_factor * R^2
  std::size_t n_paths = 1024;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct ExitStats {
  MeanSE mean_time;
  MeanSE lower_prob;
  std::size_t capped = 0;      // paths stopped by the horizon cap
  std::size_t r2_stopped = 0;  // paths stopped by the r2 cap
};

ExitStats exit_interval_stats(const ExitSettings& s);

// ---------------------------------------------------------------------------
// excursion Laplace transform E[e^-eta], eta = first |X| = epsilon from 2 eps

struct LaplaceSettings {
  double epsilon = 0.1;
  double T = 2048.0;
  double r2_0 = 0.0;
  double dt = 0.01;
  double t_cap = 20.0;  // diffusive cap; censored paths contribute 0
  std::size_t n_paths = 4096;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct LaplaceResult {
  MeanSE laplace;
  std::size_t censored = 0;
};

LaplaceResult excursion_laplace(const LaplaceSettings& s);

// Control on exactly sampled Brownian paths from 2 eps.
LaplaceResult excursion_laplace_reflected_bm(double epsilon, std::size_t n_paths,
                                             std::uint64_t seed, unsigned workers,
                                             double dt_x, double t_cap = 20.0);

// ---------------------------------------------------------------------------
// expected time spent near the origin, tau(eps sqrt(T)) ^ zeta

struct NearZeroSettings {
  double epsilon = 0.1;
  double T = 2048.0;
  double alpha2 = 5.0 / 9.0;
  double r1_0 = 0.0;
  double r2_0 = 0.0;
  double dt = 0.01;
  double cap_factor = 50.0;  // horizon cap = cap_factor * eps^2 T
  std::size_t n_paths = 2048;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct NearZeroResult {
  MeanSE mean_time;
  std::size_t capped = 0;
  std::size_t zeta_stopped = 0;
};

NearZeroResult time_near_zero(const NearZeroSettings& s);

// ---------------------------------------------------------------------------
// tail of the running sup of |r2| against the explicit bound

struct SupSettings {
  double t = 1.0;
  double T = 100.0;
  double D = 6.0;
  double r1_0 = 1.0;
  double r2_0 = 1.0;
  double dt = 0.01;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct SupResult {
  MeanSE violation_prob;  // P(sup |r2| > |r2(0)| + D)
  double bound = 0.0;     // 18 t T D exp(-(D-1)^2), clamped at 1
  double sup_max = 0.0;   // largest sup observed (diagnostic)
};

SupResult sup_r2_tail(const SupSettings& s);

// ---------------------------------------------------------------------------
// L4 ladder of r2 at the rotation times sigma_k

struct LadderSettings {
  double R = 128.0;
  double r2_0 = 2.0;
  double alpha = 0.5;
  double alpha_t = 0.6;
  double alpha_c = 0.32;
  double dt = 5e-4;
  std::size_t n_paths = 1024;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
  const model::Potential* pot = nullptr;
  sde::Scheme scheme = sde::Scheme::kSplit;
};

struct LadderResult {
  std::vector<double> estimate;  // ||r2(sigma_k)||_4 with the k<=n indicator
  std::vector<double> se;        // delta-method SE of the estimate
  std::vector<double> bound;     // 2 |r2(0)| e^{-k/R} + 3
  double worst_margin = 0.0;     // max_k (estimate - bound - 4 se)
  std::size_t worst_k = 0;
};

LadderResult r2_moment_ladder(const LadderSettings& s);

// ---------------------------------------------------------------------------
// decoupled-oracle weld: r2 marginals of the V = 0 system

struct WeldSettings {
  double r2_0 = 2.0;
  std::vector<double> times{0.5, 1.0, 3.0};
  double dt = 0.01;
  bool stationary_start = false;  // r2(0) ~ N(0, 1/2), theta uniform
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1729;
  unsigned workers = 0;
};

struct WeldPoint {
  double t = 0.0;
  MeanSE mean;
  MeanSE variance;
  MeanSE second_moment;
};

struct WeldResult {
  std::vector<WeldPoint> points;
  double z_abs_max = 0.0;  // must be bit-zero for V = 0
};

WeldResult r2_marginals(const WeldSettings& s);

// E[r(t)^2] of the decoupled analogue from a stationary start.
MeanSE analogue_stationary_second_moment(double t, std::size_t n_paths,
                                         std::uint64_t seed, unsigned workers,
                                         double dt);

}  // namespace duet::verify

#endif  // DUET_VERIFY_HPP
