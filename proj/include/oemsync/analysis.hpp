#pragma once

// Post-processing of observable series: phases of the qubit and the
// mechanics, stroboscopic sampling against the reference drive, bistable
// branch classification, limit-cycle statistics and phase-locking order.
//
// Undefined phases (atan2 of a vanishing vector, or the singular points of
// theta) are carried as std::nullopt, never as NaN.

#include <optional>
#include <vector>

#include "oemsync/records.hpp"

namespace oemsync {

using PhaseSeries = std::vector<std::optional<double>>;

struct PhaseRecord {
  std::vector<double> times;
  PhaseSeries phi;    // qubit azimuth
  PhaseSeries theta;  // qubit secondary phase
  PhaseSeries psi;    // mechanical phase
  std::vector<double> drive_phase;  // Omega t mod 2 pi, in [0, 2 pi)
};

struct Quadratures {
  std::vector<double> q, p;
};

struct QubitPhases {
  PhaseSeries phi, theta;
};

struct BlochSeries {
  std::vector<double> x, y, z;
};

/// q = <b + b^dag>, p = i<b^dag - b>, from <b>.
Quadratures quadratures(const std::vector<Complex>& b_expectation);
Quadratures quadratures(const ObservableSeries& obs);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// phi = atan2(sy, sz); theta = atan2(sy, sx sin(phi)).
QubitPhases qubit_phases(const BlochSeries& bloch);
/// Primed basis: phi' = atan2(sy', sx'); theta' = atan2(sy', sz' sin(phi')).
QubitPhases rotated_qubit_phases(const BlochSeries& bloch_rotated);

/// Lab-frame Bloch vector expressed in the qubit eigenbasis for a given mixing angle:
/// x' = cos(a) z - sin(a) x, y' = y, z' = -cos(a) x - sin(a) z.
BlochSeries to_rotated_bloch(const BlochSeries& lab, double mixing);
BlochSeries bloch_of(const ObservableSeries& obs);

/// psi = atan2(p, q); (0, 0) is undefined.
PhaseSeries mech_phase(const Quadratures& qp);

std::vector<double> drive_phase(const std::vector<double>& times, double omega);

PhaseRecord phase_record(const ObservableSeries& obs, double omega);

enum class SampleRule { uniform, golden_strobe };

inline constexpr double kGoldenFraction = 0.6180339887498949;  // (sqrt(5) - 1) / 2

/// Targets t_n = n (2 pi / |Omega|) g for integer n with t_start <= t_n <= t_end.
std::vector<double> golden_strobe_times(double t_start, double t_end, double omega);

/// Indices of the samples nearest to the golden-strobe targets (distinct,
/// increasing), or every index for the uniform rule.
std::vector<std::size_t> stroboscopic_indices(const std::vector<double>& times, double omega, SampleRule rule);

ObservableSeries select(const ObservableSeries& obs, const std::vector<std::size_t>& idx);
TrajectoryRecord stroboscopic_sample(const TrajectoryRecord& rec, double omega, SampleRule rule);

struct DwellInterval {
  double start;
  double end;
  Branch label;
  std::size_t first;  // sample indices, inclusive
  std::size_t last;

  double duration() const { return end - start; }
};

struct BranchLabeling {
  std::vector<Branch> labels;
  std::vector<DwellInterval> dwell_intervals;  // blue and red runs only, ordered
};

struct BranchOptions {
  double threshold = 0.1;
  double min_dwell = 20.0 * 3.14159265358979323846;  // ten mechanical periods at omega_m = 1
};

/// Hysteresis classifier on <sigma_x>: blue above +threshold, red below
/// -threshold, previous label in between. Runs of one label lasting less than
/// min_dwell (t_last - t_first) become transit.
BranchLabeling classify_branches(const std::vector<double>& times, const std::vector<double>& sigma_x,
                                 const BranchOptions& opts = {});

/// Applies only the min_dwell pass to an existing labeling.
BranchLabeling relabel_short_runs(const std::vector<double>& times, std::vector<Branch> labels, double min_dwell);

/// |mean_k exp(i (a_k - b_k))| over pairs where both phases are defined.
double sync_order(const PhaseSeries& a, const PhaseSeries& b);
double sync_order(const PhaseSeries& a, const std::vector<double>& b);

struct CycleStats {
  double mean_radius = 0.0;
  double radial_spread = 0.0;
  double centroid_q = 0.0;
  double centroid_p = 0.0;
  std::size_t samples = 0;
};

struct LimitCycleSummary {
  CycleStats all;
  std::optional<CycleStats> blue;
  std::optional<CycleStats> red;
};

/// Radius statistics about the centroid. Needs at least 10 samples.
CycleStats limit_cycle_stats(const std::vector<double>& q, const std::vector<double>& p);
/// Adds per-branch statistics for branches with at least 10 labeled samples.
LimitCycleSummary limit_cycle_stats(const std::vector<double>& q, const std::vector<double>& p,
                                    const BranchLabeling& labeling);

/// Restricts a phase series to the samples [first, last].
PhaseSeries slice(const PhaseSeries& s, std::size_t first, std::size_t last);
std::vector<double> slice(const std::vector<double>& s, std::size_t first, std::size_t last);

}  // namespace oemsync
