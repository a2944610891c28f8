#ifndef DUET_EXPERIMENTS_HPP
#define DUET_EXPERIMENTS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "duet/config.hpp"
#include "duet/verify.hpp"

// Experiment orchestration: maps a validated ExperimentConfig onto the
// estimators, evaluates the pass/fail bounds, and persists the artifacts
// (summary.json, plotdata.tsv, optional CSVs) into the output directory.

namespace duet::experiments {

struct PlotSeries {
  std::string name;
  std::vector<std::array<double, 3>> rows;  // x, y, y_err
};

// One row of the excursion / hitting-time event table.
struct EventRow {
  std::size_t trajectory_index = 0;
  std::string kind;  // "eta", "sigma", "zeta", "tau"
  std::size_t k = 0;
  double time = 0.0;
  double level = 0.0;
};

struct RunOutput {
  verify::EnsembleSummary summary;
  std::vector<PlotSeries> plots;
  std::vector<std::string> paths_header;          // per-path observables
  std::vector<std::vector<double>> paths_rows;
  std::optional<sde::Trajectory> trajectory;      // simulate experiment
  std::vector<EventRow> events;                   // excursions experiment
};

// Runs the configured experiment (no file output). cfg must be validated.
RunOutput run_ensemble(const config::ExperimentConfig& cfg);

// Deterministic JSON text of the summary (stable field order, no wall-clock
// metadata). The persisted summary.json is this object plus a volatile
// "runtime" block.
std::string summary_json(const RunOutput& out, const config::ExperimentConfig& cfg);

// Runs and writes summary.json, plotdata.tsv and optional CSVs into
// cfg.output_dir (which must exist). Returns the summary.
verify::EnsembleSummary run_and_write(const config::ExperimentConfig& cfg);

}  // namespace duet::experiments

#endif  // DUET_EXPERIMENTS_HPP
