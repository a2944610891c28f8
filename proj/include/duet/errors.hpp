#ifndef DUET_ERRORS_HPP
#define DUET_ERRORS_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace duet {

// A trajectory produced a non-finite state. Carries enough context to
// reproduce the offending path.
class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(std::uint64_t seed, std::uint64_t trajectory_index,
                      std::size_t step_index)
      : std::runtime_error("integration diverged at step " +
                           std::to_string(step_index) + " (seed " +
                           std::to_string(seed) + ", trajectory " +
                           std::to_string(trajectory_index) + ")"),
        seed(seed),
        trajectory_index(trajectory_index),
        step_index(step_index) {}
  std::uint64_t seed;
  std::uint64_t trajectory_index;
  std::size_t step_index;
};

// The simulation grid is too coarse for the requested observable.
class GridTooCoarse : public std::runtime_error {
 public:
  explicit GridTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

// The trajectory does not cover the requested time window.
class HorizonTooShort : public std::runtime_error {
 public:
  explicit HorizonTooShort(const std::string& what) : std::runtime_error(what) {}
};

// Configuration parsing or validation failure.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure; message includes the path.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace duet

#endif  // DUET_ERRORS_HPP
