#include "duet/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace duet::sde {

Trajectory simulate(const model::PhaseState& init, const model::Potential& pot,
                    double horizon, double dt, rng::NoiseStream* noise,
                    std::size_t stride, SimOptions opt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("simulate: horizon and dt must be positive");
  }
  if (stride < 1) throw std::invalid_argument("simulate: stride must be >= 1");

  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory traj;
  traj.sim_dt = dt;
  traj.dt = dt * static_cast<double>(stride);
  const std::size_t n_rec = n_steps / stride + 1;
  traj.times.reserve(n_rec);
  traj.r1.reserve(n_rec);
  traj.r2.reserve(n_rec);
  traj.theta1.reserve(n_rec);
  traj.theta2.reserve(n_rec);
  traj.w1.reserve(n_rec);
  traj.w2.reserve(n_rec);
  traj.z.reserve(n_rec);

  integrate(init, pot, dt, n_steps, noise, opt,
            [&](std::size_t k, double t, const model::PhaseState& s, double w1,
                double w2, double z) {
              if (k % stride != 0) return;
              traj.times.push_back(t);
              traj.r1.push_back(s.r1);
              traj.r2.push_back(s.r2);
              traj.theta1.push_back(s.theta1);
              traj.theta2.push_back(s.theta2);
              traj.w1.push_back(w1);
              traj.w2.push_back(w2);
              traj.z.push_back(z);
            });
  return traj;
}

AnaloguePath simulate_analogue(double r0, double theta0, double horizon,
                               double dt, rng::NoiseStream* noise,
                               std::size_t stride, bool with_noise) {
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("simulate_analogue: horizon and dt must be positive");
  }
  if (stride < 1) throw std::invalid_argument("simulate_analogue: stride must be >= 1");

  const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const double decay = std::exp(-dt);
  const double sigma = std::sqrt(0.5 * (1.0 - decay * decay));

  AnaloguePath path;
  path.dt = dt * static_cast<double>(stride);
  path.times.reserve(n_steps / stride + 1);
  path.r.reserve(n_steps / stride + 1);
  path.theta.reserve(n_steps / stride + 1);

  double r = r0;
  double theta = model::wrap_angle(theta0);
  path.times.push_back(0.0);
  path.r.push_back(r);
  path.theta.push_back(theta);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    theta = model::wrap_angle(theta + r * dt);
    const double xi = (with_noise && noise) ? noise->gauss_w2() : 0.0;
    r = decay * r + sigma * xi;
    if (!std::isfinite(r)) {
      throw IntegrationDiverged(noise ? noise->master_seed() : 0,
                                noise ? noise->trajectory_index() : 0, k);
    }
    if (k % stride == 0) {
      path.times.push_back(static_cast<double>(k) * dt);
      path.r.push_back(r);
      path.theta.push_back(theta);
    }
  }
  return path;
}

}  // namespace duet::sde
