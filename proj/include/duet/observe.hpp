#ifndef DUET_OBSERVE_HPP
#define DUET_OBSERVE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "duet/sde.hpp"

// Derived processes and random times read off trajectories: the diffusively
// scaled process X_t = r1(t*T)/sqrt(T), rotation times, hitting times,
// level-crossing excursions and running suprema.
//
// Continuous-time stopping times are realized on the simulation grid: level
// crossings are bracketed by grid points and linearly interpolated inside the
// bracketing step; threshold stops (corridor exit, r2 cap) trigger at the
// first grid point at or beyond the threshold.

namespace duet::observe {

// Exponent and level bookkeeping shared by the scaling experiments.
struct ScalingParams {
  double R = 128.0;      // initial |r1| level
  double alpha = 0.5;    // r2 cap exponent: |r2| <= R^alpha
  double alpha_t = 0.6;  // horizon exponent: t(R) = R^alpha_t
  double alpha_c = 0.32; // corridor exponent: c(R) = R^alpha_c
  double beta = 1.5;     // exit-interval shape
  double epsilon = 0.1;  // excursion level
  double T = 2048.0;     // diffusive time scale
  double D = 6.0;        // sup-bound margin
  double alpha1 = 6.0 / 7.0;
  double alpha2 = 5.0 / 9.0;

  double c() const noexcept;          // c(R) = R^alpha_c
  double t_horizon() const noexcept;  // t(R) = R^alpha_t

  // Throws ConfigError naming the violated inequality.
  void validate() const;
};

// A scalar path on an increasing time grid.
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  std::size_t size() const noexcept { return times.size(); }
};

Path r1_path(const sde::Trajectory& traj);
Path r2_path(const sde::Trajectory& traj);

// X_t = r1(t*T)/sqrt(T) on the rescaled grid. When t_max >= 0 the trajectory
// must cover [0, t_max*T] (throws HorizonTooShort otherwise) and the result
// is truncated to t <= t_max.
Path scaled_process(const sde::Trajectory& traj, double T, double t_max = -1.0);
Path scaled_process(const Path& physical_r1, double T, double t_max = -1.0);

// Full-rotation stopping times sigma_0 = 0,
// sigma_{k+1} = sigma_k + 1/|r1(sigma_k)| while sigma_k < t(R) ^ tau_c,
// with r1 read at the grid point nearest to sigma_k (ties to the earlier one).
struct RotationSchedule {
  std::vector<double> sigma;       // sigma_0 .. sigma_{n_tilde}
  std::optional<double> tau_c;     // corridor exit time (grid point)
  std::size_t n_tilde = 0;         // first k with sigma_k >= t(R) ^ tau_c
};

RotationSchedule rotation_schedule(const sde::Trajectory& traj,
                                   const ScalingParams& params);

enum class HitMode { kAbsolute, kSigned };

// First grid-bracketed crossing of `level`, linearly interpolated within the
// bracketing step. Returns nullopt if the path never reaches the level.
std::optional<double> hitting_time(const Path& path, double level,
                                   HitMode mode = HitMode::kAbsolute);

// Interlaced crossing ladder of |X|: down-crossings of epsilon (eta) and
// subsequent up-crossings of 2*epsilon (sigma_up), stopped at zeta when the
// |r2| path reaches r2_cap. Incomplete trailing excursions are dropped and
// counted in censored_excursions.
struct ExcursionRecord {
  std::vector<double> eta;
  std::vector<double> sigma_up;
  std::optional<double> zeta;              // diffusive time of the r2 cap stop
  std::map<double, double> tau_level;      // |r1| level -> first physical hit
  std::size_t censored_excursions = 0;

  // Completed 2*eps -> eps excursions (a sigma_up followed by an eta).
  std::size_t complete_excursions() const noexcept;
};

ExcursionRecord excursions(const Path& xpath, double epsilon,
                           const Path& r2path, double r2_cap, double T);

// max over the window [times.front(), h] of |values|, exact on the grid.
double running_sup(const Path& path, double h);

}  // namespace duet::observe

#endif  // DUET_OBSERVE_HPP
