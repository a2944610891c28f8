#ifndef DUET_SDE_HPP
#define DUET_SDE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <vector>

#include "duet/errors.hpp"
#include "duet/model.hpp"
#include "duet/rng.hpp"

// Time stepping for the coupled system and for its decoupled analogue
// (dr = -r dt + dW, dtheta = r dt).
//
// Two schemes:
//   euler  — explicit Euler-Maruyama.
//   split  — half-kick / rotate / exact-OU / half-kick. The r2 substep uses
//            the exact damped-OU transition, so with V = 0 the law of r2 is
//            dt-independent.
//
// Both accumulate the coupling integral Z with the same quadrature they use
// for the -V' term in r1, which makes the decomposition
// r1(t) = r1(0) + W1(t) + Z(t) hold at every step by construction.

namespace duet::sde {

enum class Scheme { kEuler, kSplit };

struct SimOptions {
  Scheme scheme = Scheme::kSplit;
  bool with_noise = true;
  bool with_friction = true;
};

// One Euler step; dw1, dw2 are the Gaussian sqrt(dt) increments.
// Returns the new state, adds the Z increment of this step to *z_inc.
inline model::PhaseState step_euler_z(const model::PhaseState& s,
                                      const model::Potential& pot, double dt,
                                      double dw1, double dw2,
                                      double* z_inc) noexcept {
  const double g = pot.d1(s.theta1 - s.theta2);
  model::PhaseState out;
  out.r1 = s.r1 - g * dt + dw1;
  out.r2 = s.r2 + g * dt + dw2 - s.r2 * dt;
  out.theta1 = model::wrap_angle(s.theta1 + s.r1 * dt);
  out.theta2 = model::wrap_angle(s.theta2 + s.r2 * dt);
  if (z_inc) *z_inc += -g * dt;
  return out;
}

// Precomputed per-dt constants of the split scheme.
struct SplitCoeffs {
  double dt;
  double half_dt;
  double inv_sqrt_dt;
  double ou_decay;  // e^{-dt}
  double ou_sigma;  // sqrt((1 - e^{-2 dt})/2)
  static SplitCoeffs make(double dt) noexcept {
    const double decay = std::exp(-dt);
    return {dt, 0.5 * dt, dt > 0.0 ? 1.0 / std::sqrt(dt) : 0.0, decay,
            std::sqrt(0.5 * (1.0 - decay * decay))};
  }
};

inline model::PhaseState step_split_z(const model::PhaseState& s,
                                      const model::Potential& pot,
                                      const SplitCoeffs& c, double dw1,
                                      double dw2, SimOptions opt,
                                      double* z_inc) noexcept {
  model::PhaseState x = s;
  const double g0 = pot.d1(x.theta1 - x.theta2);
  x.r1 -= g0 * c.half_dt;
  x.r2 += g0 * c.half_dt;
  x.theta1 = model::wrap_angle(x.theta1 + x.r1 * c.dt);
  x.theta2 = model::wrap_angle(x.theta2 + x.r2 * c.dt);
  if (opt.with_friction) {
    // exact damped-OU transition; xi is the unit draw behind dw2
    x.r2 = c.ou_decay * x.r2 + c.ou_sigma * (dw2 * c.inv_sqrt_dt);
  } else {
    x.r2 += dw2;
  }
  x.r1 += dw1;
  const double g1 = pot.d1(x.theta1 - x.theta2);
  x.r1 -= g1 * c.half_dt;
  x.r2 += g1 * c.half_dt;
  if (z_inc) *z_inc += -(g0 + g1) * c.half_dt;
  return x;
}

// Convenience single-step entry points (tests, small drivers).
inline model::PhaseState step_euler(const model::PhaseState& s,
                                    const model::Potential& pot, double dt,
                                    double dw1, double dw2) noexcept {
  return step_euler_z(s, pot, dt, dw1, dw2, nullptr);
}
inline model::PhaseState step_split(const model::PhaseState& s,
                                    const model::Potential& pot, double dt,
                                    double dw1, double dw2,
                                    SimOptions opt = {}) noexcept {
  if (dt == 0.0) return s;
  return step_split_z(s, pot, SplitCoeffs::make(dt), dw1, dw2, opt, nullptr);
}

// Core driver. Calls obs(step, t, state, w1, w2, z) once for the initial
// state (step 0) and once after every step. An observer returning bool stops
// the loop when it returns false. Throws IntegrationDiverged when the state
// stops being finite.
template <class Observer>
void integrate(model::PhaseState state, const model::Potential& pot, double dt,
               std::size_t n_steps, rng::NoiseStream* noise, SimOptions opt,
               Observer&& obs) {
  using Ret = decltype(obs(std::size_t{0}, 0.0, state, 0.0, 0.0, 0.0));
  constexpr bool kStoppable = std::is_same_v<Ret, bool>;
  auto call = [&obs](std::size_t k, double t, const model::PhaseState& s,
                     double w1, double w2, double z) {
    if constexpr (kStoppable) {
      return obs(k, t, s, w1, w2, z);
    } else {
      obs(k, t, s, w1, w2, z);
      return true;
    }
  };
  const SplitCoeffs c = SplitCoeffs::make(dt);
  const double sqrt_dt = std::sqrt(dt);
  double w1 = 0.0, w2 = 0.0, z = 0.0, t = 0.0;
  state = state.wrapped();
  if (!call(std::size_t{0}, t, state, w1, w2, z)) return;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    double dw1 = 0.0, dw2 = 0.0;
    if (opt.with_noise && noise != nullptr) {
      dw1 = sqrt_dt * noise->gauss_w1();
      dw2 = sqrt_dt * noise->gauss_w2();
    }
    if (opt.scheme == Scheme::kSplit) {
      state = step_split_z(state, pot, c, dw1, dw2, opt, &z);
    } else {
      if (!opt.with_friction) {
        // friction-free Euler: drop the -r2 dt term
        const double g = pot.d1(state.theta1 - state.theta2);
        model::PhaseState out;
        out.r1 = state.r1 - g * dt + dw1;
        out.r2 = state.r2 + g * dt + dw2;
        out.theta1 = model::wrap_angle(state.theta1 + state.r1 * dt);
        out.theta2 = model::wrap_angle(state.theta2 + state.r2 * dt);
        z += -g * dt;
        state = out;
      } else {
        state = step_euler_z(state, pot, dt, dw1, dw2, &z);
      }
    }
    w1 += dw1;
    w2 += dw2;
    t = static_cast<double>(k) * dt;
    if (!state.finite()) {
      throw IntegrationDiverged(noise ? noise->master_seed() : 0,
                                noise ? noise->trajectory_index() : 0, k);
    }
    if (!call(k, t, state, w1, w2, z)) return;
  }
}

// A stored trajectory on the recording grid (every `stride`-th step).
struct Trajectory {
  double dt = 0.0;      // spacing of the recorded grid (= sim_dt * stride)
  double sim_dt = 0.0;  // integrator step
  std::vector<double> times;
  std::vector<double> r1, r2, theta1, theta2;
  std::vector<double> w1, w2;  // cumulative Brownian paths
  std::vector<double> z;       // cumulative coupling integral

  std::size_t size() const noexcept { return times.size(); }
  model::PhaseState state_at(std::size_t i) const noexcept {
    return {r1[i], r2[i], theta1[i], theta2[i]};
  }
};

Trajectory simulate(const model::PhaseState& init, const model::Potential& pot,
                    double horizon, double dt, rng::NoiseStream* noise,
                    std::size_t stride = 1, SimOptions opt = {});

// Path of the decoupled Markov analogue.
struct AnaloguePath {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<double> r, theta;
  std::size_t size() const noexcept { return times.size(); }
};

// dr = -r dt + dW (exact OU transition per step), dtheta = r dt.
AnaloguePath simulate_analogue(double r0, double theta0, double horizon,
                               double dt, rng::NoiseStream* noise,
                               std::size_t stride = 1, bool with_noise = true);

}  // namespace duet::sde

#endif  // DUET_SDE_HPP
