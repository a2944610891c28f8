#include "duet/observe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "duet/errors.hpp"

namespace duet::observe {

double ScalingParams::c() const noexcept { return std::pow(R, alpha_c); }
double ScalingParams::t_horizon() const noexcept { return std::pow(R, alpha_t); }

void ScalingParams::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(R > 0.0)) fail("R must satisfy R > 0");
  if (!(T > 0.0)) fail("T must satisfy T > 0");
  if (!(epsilon > 0.0)) fail("epsilon must satisfy epsilon > 0");
  if (!(D > 0.0)) fail("D must satisfy D > 0");
  if (!(alpha > 0.0)) fail("alpha must satisfy 0 < alpha");
  if (!(alpha < alpha_t)) fail("alpha must satisfy alpha < alpha_t");
  if (!(alpha_t < 2.0 / 3.0)) fail("alpha_t must satisfy alpha_t < 2/3");
  if (!(alpha_c > 0.5 * alpha_t))
    fail("alpha_c must satisfy alpha_t/2 < alpha_c < 1/3");
  if (!(alpha_c < 1.0 / 3.0))
    fail("alpha_c must satisfy alpha_t/2 < alpha_c < 1/3");
  if (!(beta > 1.0)) fail("beta must satisfy beta > 1");
  if (!(alpha1 > 0.0 && alpha1 < 1.0)) fail("alpha1 must satisfy 0 < alpha1 < 1");
  if (!(alpha2 > 0.0 && alpha2 < 1.0)) fail("alpha2 must satisfy 0 < alpha2 < 1");
}

Path r1_path(const sde::Trajectory& traj) { return {traj.times, traj.r1}; }
Path r2_path(const sde::Trajectory& traj) { return {traj.times, traj.r2}; }

namespace {

Path scale_path(const Path& p, double T, double t_max) {
  if (!(T > 0.0)) throw std::invalid_argument("scaled_process: T must be positive");
  if (p.size() == 0) return {};
  const double last = p.times.back();
  if (t_max >= 0.0 && last < t_max * T * (1.0 - 1e-12)) {
    throw HorizonTooShort("scaled_process: trajectory covers [0, " +
                          std::to_string(last) + "] but [0, " +
                          std::to_string(t_max * T) + "] is required");
  }
  const double inv_sqrt = 1.0 / std::sqrt(T);
  Path out;
  out.times.reserve(p.size());
  out.values.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double td = p.times[i] / T;
    if (t_max >= 0.0 && td > t_max * (1.0 + 1e-12)) break;
    out.times.push_back(td);
    out.values.push_back(p.values[i] * inv_sqrt);
  }
  return out;
}

// Linear interpolation of the crossing inside a bracketing step;
// a = f(t0) - level and b = f(t1) - level are on opposite sides.
inline double interp_crossing(double t0, double t1, double a, double b) {
  if (a == 0.0) return t0;
  if (b == 0.0) return t1;
  return t0 + (t1 - t0) * (a / (a - b));
}

}  // namespace

Path scaled_process(const sde::Trajectory& traj, double T, double t_max) {
  const Path p{traj.times, traj.r1};
  return scale_path(p, T, t_max);
}

Path scaled_process(const Path& physical_r1, double T, double t_max) {
  return scale_path(physical_r1, T, t_max);
}

RotationSchedule rotation_schedule(const sde::Trajectory& traj,
                                   const ScalingParams& params) {
  params.validate();
  if (traj.size() < 2) throw std::invalid_argument("rotation_schedule: empty trajectory");
  const double R = std::fabs(traj.r1.front());
  if (std::fabs(R - params.R) > 1e-9 * std::max(1.0, params.R)) {
    throw std::invalid_argument("rotation_schedule: |r1(0)| does not match params.R");
  }
  if (R < 1.0) throw std::invalid_argument("rotation_schedule: requires |r1(0)| >= 1");

  const double cR = params.c();
  const double tR = params.t_horizon();
  const double dt = traj.dt;
  if (dt > 1.0 / (10.0 * (R + 2.0 * cR))) {
    throw GridTooCoarse("rotation_schedule: dt = " + std::to_string(dt) +
                        " exceeds 1/(10(R + 2c(R))) = " +
                        std::to_string(1.0 / (10.0 * (R + 2.0 * cR))));
  }

  // corridor exit: first grid time with |r1 - r1(0)| >= c(R)
  std::optional<double> tau_c;
  const double r10 = traj.r1.front();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (std::fabs(traj.r1[i] - r10) >= cR) {
      tau_c = traj.times[i];
      break;
    }
  }

  const double stop = tau_c ? std::min(tR, *tau_c) : tR;
  const double t_end = traj.times.back();

  RotationSchedule sched;
  sched.tau_c = tau_c;
  double s = 0.0;
  sched.sigma.push_back(s);
  std::size_t k = 0;
  while (s < stop) {
    // read r1 at the grid point nearest to sigma_k, ties to the earlier point
    const double pos = s / dt;
    auto idx = static_cast<std::size_t>(std::ceil(pos - 0.5));
    if (idx >= traj.size()) {
      throw HorizonTooShort("rotation_schedule: trajectory ends before t(R)");
    }
    const double r1k = std::fabs(traj.r1[idx]);
    if (r1k < 1e-9) {
      throw GridTooCoarse("rotation_schedule: |r1| vanished at a rotation time");
    }
    s += 1.0 / r1k;
    sched.sigma.push_back(s);
    ++k;
    if (s > t_end + dt) {
      throw HorizonTooShort("rotation_schedule: trajectory ends before t(R)");
    }
  }
  sched.n_tilde = k;  // first k with sigma_k >= t(R) ^ tau_c
  return sched;
}

std::optional<double> hitting_time(const Path& path, double level, HitMode mode) {
  const auto f = [&](double v) {
    return mode == HitMode::kAbsolute ? std::fabs(v) : v;
  };
  if (path.size() == 0) return std::nullopt;
  double a = f(path.values[0]) - level;
  if (a == 0.0) return path.times[0];
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double b = f(path.values[i + 1]) - level;
    if (a == 0.0) return path.times[i];
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      return interp_crossing(path.times[i], path.times[i + 1], a, b);
    }
    a = b;
  }
  return std::nullopt;
}

std::size_t ExcursionRecord::complete_excursions() const noexcept {
  // a completed 2eps -> eps excursion is a sigma_up with a later eta
  std::size_t n = 0;
  std::size_t j = 0;
  for (const double s : sigma_up) {
    while (j < eta.size() && eta[j] < s) ++j;
    if (j < eta.size()) {
      ++n;
      ++j;
    }
  }
  return n;
}

ExcursionRecord excursions(const Path& xpath, double epsilon, const Path& r2path,
                           double r2_cap, double T) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("excursions: epsilon must be positive");
  ExcursionRecord rec;
  if (xpath.size() == 0) return rec;

  // r2 cap stop: first grid point at or beyond the threshold
  double t_stop = xpath.times.back();
  if (r2path.size() > 0 && r2_cap > 0.0) {
    for (std::size_t i = 0; i < r2path.size(); ++i) {
      if (std::fabs(r2path.values[i]) >= r2_cap) {
        rec.zeta = r2path.times[i];
        t_stop = std::min(t_stop, *rec.zeta);
        break;
      }
    }
  }

  const double lo = epsilon, hi = 2.0 * epsilon;
  bool seeking_eta = std::fabs(xpath.values[0]) >= hi;
  double prev = std::fabs(xpath.values[0]);
  bool had_sigma_since_eta = false;
  for (std::size_t i = 0; i + 1 < xpath.size(); ++i) {
    if (xpath.times[i] >= t_stop) break;
    const double next = std::fabs(xpath.values[i + 1]);
    const double t0 = xpath.times[i], t1 = xpath.times[i + 1];
    if (seeking_eta) {
      const double a = prev - lo, b = next - lo;
      if (a > 0.0 && b <= 0.0) {
        const double tc = interp_crossing(t0, t1, a, b);
        if (tc <= t_stop) {
          rec.eta.push_back(tc);
          seeking_eta = false;
          had_sigma_since_eta = false;
        }
      }
    } else {
      const double a = prev - hi, b = next - hi;
      if (a < 0.0 && b >= 0.0) {
        const double tc = interp_crossing(t0, t1, a, b);
        if (tc <= t_stop) {
          rec.sigma_up.push_back(tc);
          seeking_eta = true;
          had_sigma_since_eta = true;
        }
      }
    }
    prev = next;
  }
  // drop a trailing up-crossing whose excursion never completed
  if (seeking_eta && had_sigma_since_eta && !rec.sigma_up.empty()) {
    rec.sigma_up.pop_back();
    rec.censored_excursions += 1;
  }

  // first hits of |r1| at the ladder levels, in physical time
  const double sqrt_T = std::sqrt(T);
  for (const double lvl : {epsilon, 2.0 * epsilon}) {
    if (auto t = hitting_time(xpath, lvl, HitMode::kAbsolute)) {
      rec.tau_level.emplace(lvl * sqrt_T, *t * T);
    }
  }
  return rec;
}

double running_sup(const Path& path, double h) {
  if (path.size() == 0) throw std::invalid_argument("running_sup: empty path");
  double m = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path.times[i] > h) break;
    m = std::max(m, std::fabs(path.values[i]));
  }
  return m;
}

}  // namespace duet::observe
