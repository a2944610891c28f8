#ifndef DUET_MODEL_HPP
#define DUET_MODEL_HPP

#include <array>
#include <cmath>
#include <string_view>

// State space, coupling potential and drift field of the two-particle system
//
//   dr1 = -V'(th1 - th2) dt + dW1
//   dr2 =  V'(th1 - th2) dt + dW2 - r2 dt
//   dth1 = r1 dt
//   dth2 = r2 dt
//
// Angles live on the unit-circumference circle R/Z and are stored in [0,1);
// one full rotation of th1 at momentum r1 takes time 1/|r1|. The built-in
// potentials are 1-periodic and normalized so that |V|, |V'| and |V''| are
// all bounded by 1.

namespace duet::model {

inline constexpr double kCircle = 1.0;  // circumference of the angle circle

// Wrap an angle into [0, 1).
inline double wrap_angle(double x) noexcept {
  x -= std::floor(x);
  return (x < 1.0) ? x : 0.0;  // floor can round up to 1.0 for tiny negatives
}

// Shortest distance to 0 on the circle.
inline double circle_abs(double x) noexcept {
  const double m = wrap_angle(x);
  return (m <= 0.5) ? m : 1.0 - m;
}

struct PhaseState {
  double r1 = 0.0;
  double r2 = 0.0;
  double theta1 = 0.0;  // in [0, 1)
  double theta2 = 0.0;  // in [0, 1)

  bool finite() const noexcept {
    return std::isfinite(r1) && std::isfinite(r2) && std::isfinite(theta1) &&
           std::isfinite(theta2);
  }
  PhaseState wrapped() const noexcept {
    return {r1, r2, wrap_angle(theta1), wrap_angle(theta2)};
  }
};

// A 1-periodic coupling potential with its first two derivatives.
// Plain function pointers keep evaluation inlinable in the steppers.
struct Potential {
  std::string_view name;
  double (*v)(double) noexcept;
  double (*dv)(double) noexcept;
  double (*ddv)(double) noexcept;

  double eval(double x) const noexcept { return v(x); }
  double d1(double x) const noexcept { return dv(x); }
  double d2(double x) const noexcept { return ddv(x); }
};

// Built-in potentials: "cos" (default), "zero" (decoupled reference mode),
// "mixed" (asymmetric stressor). Throws duet::ConfigError on unknown names.
const Potential& potential_by_name(std::string_view name);

// Names of all built-ins, for diagnostics.
std::string_view potential_names();

// Deterministic part of the equations of motion:
// (dr1, dr2, dtheta1, dtheta2) per unit time.
inline std::array<double, 4> drift(const PhaseState& s, const Potential& pot) noexcept {
  const double g = pot.d1(s.theta1 - s.theta2);
  return {-g, g - s.r2, s.r1, s.r2};
}

// H = (r1^2 + r2^2)/2 + V(th1 - th2).
inline double hamiltonian(const PhaseState& s, const Potential& pot) noexcept {
  return 0.5 * (s.r1 * s.r1 + s.r2 * s.r2) + pot.eval(s.theta1 - s.theta2);
}

}  // namespace duet::model

#endif  // DUET_MODEL_HPP
