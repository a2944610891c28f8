#include "duet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "duet/oracle.hpp"

namespace duet::verify {

namespace {

const model::Potential& resolve(const model::Potential* pot) {
  return pot ? *pot : model::potential_by_name("cos");
}

double auto_dt(double dt, double R) { return dt > 0.0 ? dt : 1.0 / (16.0 * R); }

// Built-in martingale test functions, kept as plain functions so the hot
// loops can inline them.
inline double gauss_f(double x) { return std::exp(-x * x); }
inline double gauss_f2(double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); }
inline double cauchy_f(double x) { return 1.0 / (1.0 + x * x); }
inline double cauchy_f2(double x) {
  const double d = 1.0 + x * x;
  return (6.0 * x * x - 2.0) / (d * d * d);
}

// Nearest grid index for time t on a uniform grid, ties to the earlier point.
inline std::size_t nearest_index(double t, double dt, std::size_t max_index) {
  const double pos = t / dt;
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(pos - 0.5)));
  return std::min(idx, max_index);
}

}  // namespace

void MartingaleTestSpec::validate() const {
  if (!f || !f2) throw std::invalid_argument("martingale spec: missing f or f''");
  if (!(t > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("martingale spec: t and T must be positive");
  }
  const double h = 1e-7;
  const double d0 = (f(h) - f(0.0)) / h;
  if (!(std::fabs(d0) <= 1e-6)) {
    throw std::invalid_argument("martingale spec '" + name +
                                "': f'(0+) must vanish (forward difference " +
                                std::to_string(d0) + ")");
  }
  const double dh = 1e-5;
  for (int i = 0; i <= 2000; ++i) {
    const double x = 20.0 * i / 2000.0;
    const double fx = f(x);
    const double f2x = f2(x);
    const double f1x = (f(x + dh) - f(std::max(0.0, x - dh))) / (2.0 * dh);
    const double f3x = (f2(x + dh) - f2(std::max(0.0, x - dh))) / (2.0 * dh);
    if (!std::isfinite(fx) || !std::isfinite(f1x) || !std::isfinite(f2x) ||
        !std::isfinite(f3x)) {
      throw std::invalid_argument("martingale spec '" + name +
                                  "': derivatives not finite on [0, 20]");
    }
  }
}

MartingaleTestSpec spec_gauss_bump(double t, double T) {
  return {"exp(-x^2)", gauss_f, gauss_f2, t, std::nullopt, T};
}

MartingaleTestSpec spec_cauchy_bump(double t, double T) {
  return {"1/(1+x^2)", cauchy_f, cauchy_f2, t, std::nullopt, T};
}

double path_defect(const MartingaleTestSpec& spec, std::span<const double> abs_x,
                   double dt_x) {
  if (abs_x.size() < 2) throw std::invalid_argument("path_defect: need >= 2 samples");
  double sum = 0.0;
  for (const double x : abs_x) sum += spec.f2(x);
  sum -= 0.5 * (spec.f2(abs_x.front()) + spec.f2(abs_x.back()));
  return spec.f(abs_x.back()) - spec.f(abs_x.front()) - 0.5 * dt_x * sum;
}

// ---------------------------------------------------------------------------

LimitResult run_limit(const LimitSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const auto n_steps = static_cast<std::size_t>(std::llround(s.T / s.dt));
  const auto half_step = static_cast<std::size_t>(std::llround(0.5 * s.T / s.dt));
  const double inv_sqrt_T = 1.0 / std::sqrt(s.T);
  const double dt_x = s.dt / s.T;

  std::vector<double> x_half(s.n_paths), x_one(s.n_paths);
  std::vector<double> dg(s.with_defects ? s.n_paths : 0);
  std::vector<double> dc(s.with_defects ? s.n_paths : 0);

  const bool defects = s.with_defects;
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    double sum_g = 0.0, sum_c = 0.0;
    double ax_first = 0.0, ax_last = 0.0;
    double xh = 0.0, x1 = 0.0;
    sde::integrate(
        s.init, pot, s.dt, n_steps, &ns, {s.scheme, true, true},
        [&](std::size_t k, double, const model::PhaseState& st, double, double,
            double) {
          const double x = st.r1 * inv_sqrt_T;
          if (defects) {
            const double ax = std::fabs(x);
            sum_g += gauss_f2(ax);
            sum_c += cauchy_f2(ax);
            if (k == 0) ax_first = ax;
            if (k == n_steps) ax_last = ax;
          }
          if (k == half_step) xh = x;
          if (k == n_steps) x1 = x;
        });
    x_half[i] = xh;
    x_one[i] = x1;
    if (defects) {
      sum_g -= 0.5 * (gauss_f2(ax_first) + gauss_f2(ax_last));
      sum_c -= 0.5 * (cauchy_f2(ax_first) + cauchy_f2(ax_last));
      dg[i] = gauss_f(ax_last) - gauss_f(ax_first) - 0.5 * dt_x * sum_g;
      dc[i] = cauchy_f(ax_last) - cauchy_f(ax_first) - 0.5 * dt_x * sum_c;
    }
  });

  LimitResult out;
  std::vector<double> abs_one(s.n_paths), abs_half(s.n_paths), qv(s.n_paths);
  for (std::size_t i = 0; i < s.n_paths; ++i) {
    abs_one[i] = std::fabs(x_one[i]);
    abs_half[i] = std::fabs(x_half[i]);
    const double d = x_one[i] - x_half[i];
    qv[i] = d * d;
  }
  out.ks_one = ks_statistic(abs_one, [](double x) { return oracle::half_normal_cdf(x, 1.0); });
  out.ks_half = ks_statistic(abs_half, [](double x) { return oracle::half_normal_cdf(x, 0.5); });
  out.quad_var = mean_se(qv);
  if (s.with_defects) {
    out.defect_gauss = mean_se(dg);
    out.defect_cauchy = mean_se(dc);
  }
  out.x_half = std::move(x_half);
  out.x_one = std::move(x_one);
  return out;
}

MeanSE martingale_defect_reflected_bm(const MartingaleTestSpec& spec,
                                      std::size_t n_paths, std::uint64_t seed,
                                      unsigned workers, double dt_x) {
  spec.validate();
  const auto n_steps = static_cast<std::size_t>(std::llround(spec.t / dt_x));
  std::vector<double> grid(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) grid[k] = static_cast<double>(k) * dt_x;
  std::vector<double> defects(n_paths);
  parallel_for_paths(n_paths, workers, [&](std::size_t i) {
    rng::GaussianStream gs(seed, i, rng::kChannelW1);
    const std::vector<double> path = oracle::sample_reflected_bm(grid, gs);
    defects[i] = path_defect(spec, path, dt_x);
  });
  return mean_se(defects);
}

// ---------------------------------------------------------------------------

ExpansionResult expansion_residual(const ExpansionSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  if (s.steps_per_sigma < 100) {
    throw GridTooCoarse("expansion_residual: dt must be <= sigma/100");
  }
  ExpansionResult out;
  std::vector<double> sigmas, l2r, l2c;
  for (std::size_t j = 0; j < s.r_list.size(); ++j) {
    const double R = s.r_list[j];
    if (R < 2.0) throw std::invalid_argument("expansion_residual: requires R >= 2");
    const double sigma = 1.0 / R;
    const double dt = sigma / static_cast<double>(s.steps_per_sigma);
    const std::uint64_t seed_j = sub_seed(s.seed, j);

    std::vector<double> refined_sq(s.n_paths), crude_sq(s.n_paths);
    parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
      rng::NoiseStream ns(seed_j, i);
      const double th1 = ns.uniform_init();
      const double th2 = ns.uniform_init();
      model::PhaseState init{R, s.r2_0, th1, th2};
      double z_end = 0.0;
      sde::integrate(init, pot, dt, s.steps_per_sigma, &ns,
                     {s.scheme, true, true},
                     [&](std::size_t k, double, const model::PhaseState&, double,
                         double, double z) {
                       if (k == s.steps_per_sigma) z_end = z;
                     });
      const double leading = s.r2_0 / (R * R) * pot.d1(th1 - th2);
      const double refined = z_end - leading;
      refined_sq[i] = refined * refined;
      crude_sq[i] = z_end * z_end;
    });

    ExpansionPoint pt;
    pt.R = R;
    pt.sigma = sigma;
    const double mr = pairwise_sum(refined_sq) / static_cast<double>(s.n_paths);
    const double mc = pairwise_sum(crude_sq) / static_cast<double>(s.n_paths);
    pt.l2_refined = std::sqrt(mr);
    pt.l2_crude = std::sqrt(mc);

    // bootstrap standard errors for the two L2 estimates
    if (s.bootstrap > 1) {
      rng::GaussianStream bs(sub_seed(s.seed, j, 1), 0, 0);
      std::vector<double> br(s.bootstrap), bc(s.bootstrap);
      const double n = static_cast<double>(s.n_paths);
      for (std::size_t b = 0; b < s.bootstrap; ++b) {
        double sr = 0.0, sc = 0.0;
        for (std::size_t k = 0; k < s.n_paths; ++k) {
          const auto idx = static_cast<std::size_t>(bs.next_uniform() * n);
          sr += refined_sq[idx < s.n_paths ? idx : s.n_paths - 1];
          sc += crude_sq[idx < s.n_paths ? idx : s.n_paths - 1];
        }
        br[b] = std::sqrt(sr / n);
        bc[b] = std::sqrt(sc / n);
      }
      const MeanSE mbr = mean_se(br), mbc = mean_se(bc);
      pt.se_refined = mbr.se * std::sqrt(static_cast<double>(s.bootstrap));
      pt.se_crude = mbc.se * std::sqrt(static_cast<double>(s.bootstrap));
    }
    out.points.push_back(pt);
    sigmas.push_back(sigma);
    l2r.push_back(pt.l2_refined);
    l2c.push_back(pt.l2_crude);
  }
  out.slope_refined = loglog_slope(sigmas, l2r);
  out.slope_crude = loglog_slope(sigmas, l2c);
  return out;
}

// ---------------------------------------------------------------------------

MomentResult moment_drift_diffusion(const MomentSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const double dt = auto_dt(s.dt, s.R);
  const double t_R = std::pow(s.R, s.alpha_t);
  const auto n_steps = static_cast<std::size_t>(std::llround(t_R / dt));
  const double t_eff = static_cast<double>(n_steps) * dt;

  std::vector<double> incr(s.n_paths), incr_sq(s.n_paths);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{s.R, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    double r1_end = 0.0;
    sde::integrate(init, pot, dt, n_steps, &ns, {s.scheme, true, true},
                   [&](std::size_t k, double, const model::PhaseState& st, double,
                       double, double) {
                     if (k == n_steps) r1_end = st.r1;
                   });
    const double d = r1_end - s.R;
    incr[i] = d;
    incr_sq[i] = d * d;
  });

  MomentResult out;
  out.t_R = t_eff;
  out.drift = mean_se(incr);
  out.second = mean_se(incr_sq);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<DecorrelationCell> decorrelation(const DecorrelationSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const double dt = auto_dt(s.dt, s.R);
  std::vector<std::size_t> idx(s.t_list.size());
  std::size_t n_steps = 0;
  for (std::size_t j = 0; j < s.t_list.size(); ++j) {
    idx[j] = static_cast<std::size_t>(std::llround(s.t_list[j] / dt));
    n_steps = std::max(n_steps, idx[j]);
  }

  const std::size_t nt = s.t_list.size();
  std::vector<double> r2v(nt * s.n_paths), th2v(nt * s.n_paths);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    double th1 = 0.0, th2 = 0.0;
    if (s.theta_init) {
      th1 = s.theta_init->first;
      th2 = s.theta_init->second;
    } else {
      th1 = ns.uniform_init();
      th2 = ns.uniform_init();
    }
    model::PhaseState init{s.R, s.r2_0, th1, th2};
    sde::integrate(init, pot, dt, n_steps, &ns, {s.scheme, true, true},
                   [&](std::size_t k, double, const model::PhaseState& st, double,
                       double, double) {
                     for (std::size_t j = 0; j < nt; ++j) {
                       if (k == idx[j]) {
                         r2v[j * s.n_paths + i] = st.r2;
                         th2v[j * s.n_paths + i] = st.theta2;
                       }
                     }
                   });
  });

  std::vector<DecorrelationCell> cells;
  std::vector<double> vals(s.n_paths);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t m = 0; m < s.n_theta0; ++m) {
      const double theta0 =
          static_cast<double>(m) / static_cast<double>(s.n_theta0);
      for (std::size_t i = 0; i < s.n_paths; ++i) {
        vals[i] = r2v[j * s.n_paths + i] * pot.d1(th2v[j * s.n_paths + i] - theta0);
      }
      cells.push_back({s.t_list[j], theta0, mean_se(vals)});
    }
  }
  return cells;
}

MeanSE decorrelation_analogue(double t, double theta0, std::size_t n_paths,
                              std::uint64_t seed, unsigned workers, double dt,
                              const model::Potential* pot) {
  const model::Potential& p = resolve(pot);
  std::vector<double> vals(n_paths);
  parallel_for_paths(n_paths, workers, [&](std::size_t i) {
    rng::NoiseStream ns(seed, i);
    const double r0 = std::sqrt(0.5) * ns.gauss_init();
    const double th0 = ns.uniform_init();
    const auto path = sde::simulate_analogue(r0, th0, t, dt, &ns);
    vals[i] = path.r.back() * p.d1(path.theta.back() - theta0);
  });
  return mean_se(vals);
}

// ---------------------------------------------------------------------------

ExitStats exit_interval_stats(const ExitSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const double a = std::pow(0.5, 1.0 / s.beta) * s.R;
  const double b = std::pow(2.0, 1.0 / s.beta) * s.R;
  const double r2_cap = std::pow(s.R, s.alpha);
  const double t_cap = s.cap_factor * s.R * s.R;
  const auto cap_steps = static_cast<std::size_t>(std::llround(t_cap / s.dt));

  std::vector<double> times(s.n_paths), lower(s.n_paths);
  std::vector<unsigned char> capped(s.n_paths, 0), r2_stopped(s.n_paths, 0);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{s.R, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    double prev = s.R;
    double tau = t_cap;
    double side = 0.0;
    bool done = false;
    sde::integrate(init, pot, s.dt, cap_steps, &ns,
                   {s.scheme, true, true},
                   [&](std::size_t k, double t, const model::PhaseState& st,
                       double, double, double) -> bool {
                     if (k == 0) return true;
                     const double cur = std::fabs(st.r1);
                     if (cur <= a) {
                       const double fa = prev - a, fb = cur - a;
                       tau = t - s.dt + s.dt * (fa / (fa - fb));
                       side = 1.0;
                       done = true;
                       return false;
                     }
                     if (cur >= b) {
                       const double fa = prev - b, fb = cur - b;
                       tau = t - s.dt + s.dt * (fa / (fa - fb));
                       side = 0.0;
                       done = true;
                       return false;
                     }
                     if (std::fabs(st.r2) >= r2_cap) {
                       tau = t;
                       side = 0.0;
                       r2_stopped[i] = 1;
                       done = true;
                       return false;
                     }
                     prev = cur;
                     return true;
                   });
    if (!done) capped[i] = 1;
    times[i] = tau;
    lower[i] = side;
  });

  ExitStats out;
  out.mean_time = mean_se(times);
  out.lower_prob = mean_se(lower);
  for (std::size_t i = 0; i < s.n_paths; ++i) {
    out.capped += capped[i];
    out.r2_stopped += r2_stopped[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

LaplaceResult excursion_laplace(const LaplaceSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const double sqrt_T = std::sqrt(s.T);
  const double start = 2.0 * s.epsilon * sqrt_T;
  const double level = s.epsilon * sqrt_T;
  const auto cap_steps =
      static_cast<std::size_t>(std::llround(s.t_cap * s.T / s.dt));

  std::vector<double> vals(s.n_paths);
  std::vector<unsigned char> censored(s.n_paths, 0);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{start, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    double prev = start;
    double value = 0.0;
    bool hit = false;
    sde::integrate(init, pot, s.dt, cap_steps, &ns,
                   {s.scheme, true, true},
                   [&](std::size_t k, double t, const model::PhaseState& st,
                       double, double, double) -> bool {
                     if (k == 0) return true;
                     const double cur = std::fabs(st.r1);
                     if (cur <= level) {
                       const double fa = prev - level, fb = cur - level;
                       const double tau = t - s.dt + s.dt * (fa / (fa - fb));
                       value = std::exp(-tau / s.T);
                       hit = true;
                       return false;
                     }
                     prev = cur;
                     return true;
                   });
    if (!hit) censored[i] = 1;  // contributes exp(-eta) ~ 0
    vals[i] = value;
  });

  LaplaceResult out;
  out.laplace = mean_se(vals);
  for (std::size_t i = 0; i < s.n_paths; ++i) out.censored += censored[i];
  return out;
}

LaplaceResult excursion_laplace_reflected_bm(double epsilon, std::size_t n_paths,
                                             std::uint64_t seed, unsigned workers,
                                             double dt_x, double t_cap) {
  const auto cap_steps = static_cast<std::size_t>(std::llround(t_cap / dt_x));
  const double sq = std::sqrt(dt_x);
  std::vector<double> vals(n_paths);
  std::vector<unsigned char> censored(n_paths, 0);
  parallel_for_paths(n_paths, workers, [&](std::size_t i) {
    rng::GaussianStream gs(seed, i, rng::kChannelW1);
    double w = 2.0 * epsilon;
    double prev = std::fabs(w);
    double value = 0.0;
    bool hit = false;
    for (std::size_t k = 1; k <= cap_steps; ++k) {
      w += sq * gs.next_gaussian();
      const double cur = std::fabs(w);
      if (cur <= epsilon) {
        const double fa = prev - epsilon, fb = cur - epsilon;
        const double tau =
            (static_cast<double>(k) - 1.0 + fa / (fa - fb)) * dt_x;
        value = std::exp(-tau);
        hit = true;
        break;
      }
      prev = cur;
    }
    if (!hit) censored[i] = 1;
    vals[i] = value;
  });
  LaplaceResult out;
  out.laplace = mean_se(vals);
  for (std::size_t i = 0; i < n_paths; ++i) out.censored += censored[i];
  return out;
}

// ---------------------------------------------------------------------------

NearZeroResult time_near_zero(const NearZeroSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const double sqrt_T = std::sqrt(s.T);
  const double level = s.epsilon * sqrt_T;
  const double r2_cap = std::pow(std::log(s.T), s.alpha2);
  const double t_cap = s.cap_factor * s.epsilon * s.epsilon * s.T;
  const auto cap_steps = static_cast<std::size_t>(std::llround(t_cap / s.dt));
  if (std::fabs(s.r1_0) > level) {
    throw std::invalid_argument("time_near_zero: requires |r1(0)| <= eps sqrt(T)");
  }

  std::vector<double> vals(s.n_paths);
  std::vector<unsigned char> capped(s.n_paths, 0), zeta(s.n_paths, 0);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{s.r1_0, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    double prev = std::fabs(s.r1_0);
    double tau = t_cap;
    bool done = false;
    sde::integrate(init, pot, s.dt, cap_steps, &ns,
                   {s.scheme, true, true},
                   [&](std::size_t k, double t, const model::PhaseState& st,
                       double, double, double) -> bool {
                     if (k == 0) {
                       if (prev >= level) {  // started at the level: tau = 0
                         tau = 0.0;
                         done = true;
                         return false;
                       }
                       return true;
                     }
                     const double cur = std::fabs(st.r1);
                     if (cur >= level) {
                       const double fa = prev - level, fb = cur - level;
                       tau = t - s.dt + s.dt * (fa / (fa - fb));
                       done = true;
                       return false;
                     }
                     if (std::fabs(st.r2) >= r2_cap) {
                       tau = t;
                       zeta[i] = 1;
                       done = true;
                       return false;
                     }
                     prev = cur;
                     return true;
                   });
    if (!done) capped[i] = 1;
    vals[i] = tau;
  });

  NearZeroResult out;
  out.mean_time = mean_se(vals);
  for (std::size_t i = 0; i < s.n_paths; ++i) {
    out.capped += capped[i];
    out.zeta_stopped += zeta[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

SupResult sup_r2_tail(const SupSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  const auto n_steps = static_cast<std::size_t>(std::llround(s.t * s.T / s.dt));
  const double threshold = std::fabs(s.r2_0) + s.D;

  std::vector<double> viol(s.n_paths), sups(s.n_paths);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{s.r1_0, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    double sup = std::fabs(s.r2_0);
    sde::integrate(init, pot, s.dt, n_steps, &ns,
                   {s.scheme, true, true},
                   [&](std::size_t, double, const model::PhaseState& st, double,
                       double, double) {
                     const double a = std::fabs(st.r2);
                     if (a > sup) sup = a;
                   });
    sups[i] = sup;
    viol[i] = sup > threshold ? 1.0 : 0.0;
  });

  SupResult out;
  out.violation_prob = mean_se(viol);
  out.bound = oracle::doob_bound(s.t, s.T, s.D);
  out.sup_max = *std::max_element(sups.begin(), sups.end());
  return out;
}

// ---------------------------------------------------------------------------

LadderResult r2_moment_ladder(const LadderSettings& s) {
  const model::Potential& pot = resolve(s.pot);
  observe::ScalingParams params;
  params.R = s.R;
  params.alpha = s.alpha;
  params.alpha_t = s.alpha_t;
  params.alpha_c = s.alpha_c;
  params.validate();

  const double tR = params.t_horizon();
  const double cR = params.c();
  const double horizon = tR + 0.1;
  const auto k_cap =
      static_cast<std::size_t>(std::ceil(tR * (s.R + 2.0 * cR))) + 2;

  std::vector<double> quads(s.n_paths * k_cap, 0.0);
  std::vector<std::size_t> n_tildes(s.n_paths, 0);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    model::PhaseState init{s.R, s.r2_0, ns.uniform_init(), ns.uniform_init()};
    const sde::Trajectory traj =
        sde::simulate(init, pot, horizon, s.dt, &ns, 1);
    const observe::RotationSchedule sched = observe::rotation_schedule(traj, params);
    n_tildes[i] = sched.n_tilde;
    const std::size_t n_read = std::min(sched.sigma.size(), k_cap);
    for (std::size_t k = 0; k < n_read; ++k) {
      const std::size_t idx =
          nearest_index(sched.sigma[k], traj.dt, traj.size() - 1);
      const double v = traj.r2[idx];
      quads[i * k_cap + k] = v * v * v * v;
    }
  });

  const std::size_t k_max = std::min(
      k_cap, 1 + *std::max_element(n_tildes.begin(), n_tildes.end()));
  LadderResult out;
  out.estimate.resize(k_max);
  out.se.resize(k_max);
  out.bound.resize(k_max);
  out.worst_margin = -1e300;
  std::vector<double> col(s.n_paths);
  for (std::size_t k = 0; k < k_max; ++k) {
    for (std::size_t i = 0; i < s.n_paths; ++i) col[i] = quads[i * k_cap + k];
    const MeanSE m = mean_se(col);
    const double est = std::pow(std::max(m.mean, 0.0), 0.25);
    const double se4 =
        m.mean > 0.0 ? m.se / (4.0 * std::pow(m.mean, 0.75)) : 0.0;
    out.estimate[k] = est;
    out.se[k] = se4;
    out.bound[k] = 2.0 * std::fabs(s.r2_0) *
                       std::exp(-static_cast<double>(k) / s.R) +
                   3.0;
    const double margin = est - out.bound[k] - 4.0 * se4;
    if (margin > out.worst_margin) {
      out.worst_margin = margin;
      out.worst_k = k;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

WeldResult r2_marginals(const WeldSettings& s) {
  const model::Potential& pot = model::potential_by_name("zero");
  std::vector<std::size_t> idx(s.times.size());
  std::size_t n_steps = 0;
  for (std::size_t j = 0; j < s.times.size(); ++j) {
    idx[j] = static_cast<std::size_t>(std::llround(s.times[j] / s.dt));
    n_steps = std::max(n_steps, idx[j]);
  }

  const std::size_t nt = s.times.size();
  std::vector<double> r2v(nt * s.n_paths);
  std::vector<double> zmax(s.n_paths, 0.0);
  parallel_for_paths(s.n_paths, s.workers, [&](std::size_t i) {
    rng::NoiseStream ns(s.seed, i);
    double r2_0 = s.r2_0;
    double th1 = 0.0, th2 = 0.0;
    if (s.stationary_start) {
      r2_0 = std::sqrt(0.5) * ns.gauss_init();
      th1 = ns.uniform_init();
      th2 = ns.uniform_init();
    }
    model::PhaseState init{0.0, r2_0, th1, th2};
    double zm = 0.0;
    // the weld compares against exact OU marginals, so the split scheme is
    // required here (its r2 transition is exact in law)
    sde::integrate(init, pot, s.dt, n_steps, &ns,
                   {sde::Scheme::kSplit, true, true},
                   [&](std::size_t k, double, const model::PhaseState& st, double,
                       double, double z) {
                     if (std::fabs(z) > zm) zm = std::fabs(z);
                     for (std::size_t j = 0; j < nt; ++j) {
                       if (k == idx[j]) r2v[j * s.n_paths + i] = st.r2;
                     }
                   });
    zmax[i] = zm;
  });

  WeldResult out;
  std::vector<double> col(s.n_paths), sq(s.n_paths);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < s.n_paths; ++i) {
      col[i] = r2v[j * s.n_paths + i];
      sq[i] = col[i] * col[i];
    }
    WeldPoint pt;
    pt.t = static_cast<double>(idx[j]) * s.dt;
    pt.mean = mean_se(col);
    pt.variance = variance_se(col);
    pt.second_moment = mean_se(sq);
    out.points.push_back(pt);
  }
  out.z_abs_max = *std::max_element(zmax.begin(), zmax.end());
  return out;
}

MeanSE analogue_stationary_second_moment(double t, std::size_t n_paths,
                                         std::uint64_t seed, unsigned workers,
                                         double dt) {
  std::vector<double> vals(n_paths);
  parallel_for_paths(n_paths, workers, [&](std::size_t i) {
    rng::NoiseStream ns(seed, i);
    const double r0 = std::sqrt(0.5) * ns.gauss_init();
    const double th0 = ns.uniform_init();
    const auto path = sde::simulate_analogue(r0, th0, t, dt, &ns);
    vals[i] = path.r.back() * path.r.back();
  });
  return mean_se(vals);
}

}  // namespace duet::verify
