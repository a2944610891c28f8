#ifndef DUET_CONFIG_HPP
#define DUET_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "duet/observe.hpp"

// Experiment configuration: a flat key-value file (TOML-compatible subset:
// `key = value`, one per line, `#` comments, optional quotes around strings),
// overridable field by field from CLI flags. Validation reports the violated
// inequality by name.

namespace duet::config {

enum class Experiment {
  kSimulate,
  kLimit,
  kExpansion,
  kMoments,
  kDecorrelation,
  kExit,
  kExcursions,
  kNearZero,
  kMartingale,
  kSupR2,
};

const char* to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& name);
std::vector<Experiment> all_experiments();

// One help line per experiment: what it measures and the statement it checks.
const char* experiment_summary(Experiment e);
// The anchor label (theorem/lemma/proposition) the experiment verifies.
const char* experiment_anchor(Experiment e);

struct ExperimentConfig {
  Experiment experiment = Experiment::kLimit;
  std::string potential = "cos";

  // scaling and level parameters
  double T = 2048.0;
  double R = 128.0;
  double epsilon = 0.1;
  double beta = 1.5;
  double alpha = 0.5;
  double alpha_t = 0.6;
  double alpha_c = 0.32;
  double alpha1 = 6.0 / 7.0;
  double alpha2 = 5.0 / 9.0;
  double D = 6.0;

  // integration
  double dt = 0.01;
  std::string integrator = "split";  // "split" | "euler"
  std::size_t n_paths = 4096;
  std::uint64_t seed = 1729;

  // simulate-experiment specifics
  double horizon = 10.0;
  std::size_t stride = 1;
  double r1_0 = 0.0;
  double r2_0 = 0.0;
  double theta1_0 = 0.0;
  double theta2_0 = 0.0;

  bool write_paths = false;

  // execution details; not part of the semantic digest
  unsigned workers = 0;
  std::string output_dir = ".";

  // Throws ConfigError naming the violated constraint.
  void validate() const;

  // FNV-1a hash (hex) of the sorted semantic key-value pairs. Changes when
  // any semantic field changes; workers and output_dir are excluded.
  std::string digest() const;

  // Sorted semantic fields as (key, value-string) pairs.
  std::vector<std::pair<std::string, std::string>> semantic_items() const;

  observe::ScalingParams scaling() const;
};

// Set a field by key with a string value; throws ConfigError on unknown keys
// or unparsable values. `context` prefixes error messages (file:line or flag).
void apply_kv(ExperimentConfig& cfg, const std::string& key,
              const std::string& value, const std::string& context = "");

// Read a field by key as a string; throws ConfigError on unknown keys.
std::string get_kv(const ExperimentConfig& cfg, const std::string& key);

// Parse a config file into `cfg` (fields present in the file override the
// current values). Throws ConfigError with file/line context.
void load_file(ExperimentConfig& cfg, const std::string& path);

ExperimentConfig parse_file(const std::string& path);

}  // namespace duet::config

#endif  // DUET_CONFIG_HPP
