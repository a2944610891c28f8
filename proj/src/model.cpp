#include "duet/model.hpp"

#include <cmath>

#include "duet/errors.hpp"

namespace duet::model {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// cos(2*pi*x)/(2*pi)^2 is the strongest pure cosine with |V''| <= 1.
constexpr double kCosAmp = 1.0 / (kTwoPi * kTwoPi);

double cos_v(double x) noexcept { return kCosAmp * std::cos(kTwoPi * x); }
double cos_dv(double x) noexcept { return -std::sin(kTwoPi * x) / kTwoPi; }
double cos_ddv(double x) noexcept { return -std::cos(kTwoPi * x); }

double zero_v(double) noexcept { return 0.0; }

// Asymmetric stressor: cos(2*pi*x)/2 + sin(4*pi*x)/8, normalized like "cos".
double mixed_v(double x) noexcept {
  return kCosAmp * (0.5 * std::cos(kTwoPi * x) + 0.125 * std::sin(2.0 * kTwoPi * x));
}
double mixed_dv(double x) noexcept {
  return (-0.5 * std::sin(kTwoPi * x) + 0.25 * std::cos(2.0 * kTwoPi * x)) / kTwoPi;
}
double mixed_ddv(double x) noexcept {
  return -0.5 * std::cos(kTwoPi * x) - 0.5 * std::sin(2.0 * kTwoPi * x);
}

constexpr Potential kCos{"cos", cos_v, cos_dv, cos_ddv};
constexpr Potential kZero{"zero", zero_v, zero_v, zero_v};
constexpr Potential kMixed{"mixed", mixed_v, mixed_dv, mixed_ddv};

}  // namespace

const Potential& potential_by_name(std::string_view name) {
  if (name == "cos") return kCos;
  if (name == "zero") return kZero;
  if (name == "mixed") return kMixed;
  throw ConfigError("unknown potential '" + std::string(name) +
                    "' (known: " + std::string(potential_names()) + ")");
}

std::string_view potential_names() { return "cos, zero, mixed"; }

}  // namespace duet::model
