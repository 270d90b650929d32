#pragma once

// Run orchestration for the command-line tool: builds the model from a
// RunConfig, executes the selected mode, writes the CSV (and optionally SVG)
// artifacts and produces a one-line summary.

#include <optional>
#include <string>
#include <vector>

#include "oemsync/analysis.hpp"
#include "oemsync/config.hpp"
#include "oemsync/records.hpp"
#include "oemsync/solvers.hpp"

namespace oemsync {

/// Scalar summary of one trajectory, the quantities the acceptance checks read.
struct TrajectorySummary {
  BranchLabeling labeling;
  std::size_t blue_dwells = 0;
  std::size_t red_dwells = 0;
  std::optional<double> blue_mean_sx;  // over samples labeled blue
  std::optional<double> red_mean_sx;
  double shortest_dwell = 0.0;  // over all blue and red intervals; 0 if none
  // Sync orders against the drive phase inside the longest interval of each branch.
  std::optional<double> blue_sync_phi, blue_sync_psi;
  std::optional<double> red_sync_phi, red_sync_psi;
  // Late window t > late_start.
  std::optional<double> late_mean_n_mech;
  std::optional<CycleStats> late_cycle;
};

/// `obs` should already be sampled the way it is to be analyzed.
TrajectorySummary summarize_trajectory(const ObservableSeries& obs, double omega, const BranchOptions& branch,
                                       double late_start);

std::string to_string(const TrajectorySummary& s);

struct ValidationReport {
  SpaceConfig base, doubled;
  double n_mech_base = 0.0, n_mech_doubled = 0.0;  // time averages
  double n_cav_base = 0.0, n_cav_doubled = 0.0;
  double rel_n_mech = 0.0, rel_n_cav = 0.0;
  double tolerance = 0.05;
  EnsembleRecord base_run;

  bool passed() const { return rel_n_mech < tolerance && rel_n_cav < tolerance; }
};

/// Trajectory ensembles with identical seeds at (n_mech, n_cav) and at twice
/// both truncations; compares time-averaged ensemble-mean phonon and photon numbers.
ValidationReport run_validation(const RunConfig& cfg);

struct RunOutcome {
  int exit_code = 0;
  std::string summary;
  std::vector<std::string> artifacts;
};

/// Executes cfg.mode and writes the artifacts. Solver and I/O failures throw.
RunOutcome run(const RunConfig& cfg);

/// Initial state from the [initial] section on the given space.
PureState initial_state(const RunConfig& cfg, const SpaceConfig& space);

TimeGrid time_grid(const RunConfig& cfg);

}  // namespace oemsync
