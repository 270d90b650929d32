#pragma once

// Time evolution: Lindblad master equation, Monte-Carlo wave-function
// trajectories, seeded ensembles of trajectories, and a closed-system
// Schroedinger reference integrator.

#include <cstdint>
#include <limits>
#include <vector>

#include "oemsync/kernels.hpp"
#include "oemsync/linalg.hpp"
#include "oemsync/model.hpp"
#include "oemsync/ode.hpp"
#include "oemsync/records.hpp"

namespace oemsync {

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt_out = 0.1;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();

  /// t_end >= t_start (equal gives a single sample), dt_out > 0, tolerances > 0.
  void validate() const;
  /// t_start + k * dt_out for k = 0..floor((t_end - t_start) / dt_out).
  std::vector<double> output_times() const;
  IntegratorOptions integrator() const { return {rel_tol, abs_tol, max_step}; }
};

struct SolverOptions {
  kernels::Exec exec = kernels::Exec::serial;
  /// Operators whose expectations are recorded into ObservableSeries::extra.
  std::vector<SparseOperator> extra_observables;
  /// Master equation only: keep the density matrix at every output time.
  bool store_states = false;
};

struct MasterResult {
  ObservableSeries obs;
  std::vector<double> trace;  // Re tr(rho) per output time
  std::vector<DenseMatrix> states;
  DenseMatrix final_state;
  double max_trace_drift = 0.0;
  double max_hermiticity_defect = 0.0;
};

/// drho/dt = -i[H, rho] + sum_k (c rho c^dag - {c^dag c, rho}/2)
MasterResult evolve_master(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                           const DensityMatrix& rho0, const TimeGrid& grid, const SpaceConfig& space,
                           const SolverOptions& opts = {});

/// H(t) - (i/2) sum_k c_k^dag c_k
TimeDependentHamiltonian effective_hamiltonian(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops);

/// Monte-Carlo wave-function unraveling. Jumps are placed where the squared
/// norm of the unnormalized state crosses a uniform variate r, located by
/// bisection on the step's continuous extension to 1e-10 relative accuracy.
TrajectoryRecord evolve_trajectory(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                                   const PureState& psi0, const TimeGrid& grid, std::uint64_t seed,
                                   const SpaceConfig& space, const SolverOptions& opts = {});

struct EnsembleOptions {
  int threads = 0;  // 0: kernels::thread_budget()
  bool keep_records = false;
  SolverOptions solver;
};

/// Seeds base_seed .. base_seed + n_traj - 1. Reduction runs in seed order,
/// so the result does not depend on thread count or scheduling.
EnsembleRecord run_ensemble(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                            const PureState& psi0, const TimeGrid& grid, std::size_t n_traj,
                            std::uint64_t base_seed, const SpaceConfig& space, const EnsembleOptions& opts = {});

/// Same reduction with every trajectory run on the calling thread, in seed order.
EnsembleRecord run_ensemble_serial(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                                   const PureState& psi0, const TimeGrid& grid, std::size_t n_traj,
                                   std::uint64_t base_seed, const SpaceConfig& space,
                                   const EnsembleOptions& opts = {});

struct ReferenceResult {
  ObservableSeries obs;
  std::vector<double> norm2;
  Vector final_state;
};

/// Closed-system reference: fixed-step classical RK4 with step <= ref_step.
ReferenceResult schroedinger_reference(const TimeDependentHamiltonian& h, const PureState& psi0,
                                        const TimeGrid& grid, const SpaceConfig& space, double ref_step = 2e-3,
                                        const SolverOptions& opts = {});

}  // namespace oemsync
