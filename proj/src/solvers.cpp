#include "oemsync/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <optional>
#include <string>

#include "oemsync/errors.hpp"
#include "oemsync/rng.hpp"

namespace oemsync {

void TimeGrid::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start) {
    throw InvariantError("time grid needs finite t_end >= t_start");
  }
  if (!(dt_out > 0.0)) throw InvariantError("dt_out must be > 0");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw InvariantError("integrator tolerances must be > 0");
  if (!(max_step > 0.0)) throw InvariantError("max_step must be > 0");
}

std::vector<double> TimeGrid::output_times() const {
  validate();
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt_out + 1e-9));
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = t_start + static_cast<double>(k) * dt_out;
  return t;
}

namespace {

void check_dims(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops, Index state_dim,
                const SpaceConfig& space) {
  if (h.dim() != space.total_dim() || state_dim != space.total_dim()) {
    throw DimensionError("Hamiltonian, state and space dimensions disagree");
  }
  for (const auto& c : c_ops)
    if (c.op.dim() != space.total_dim()) throw DimensionError("collapse operator dimension mismatch");
}

// y = -i H(t) x
void apply_generator(const TimeDependentHamiltonian& h, kernels::Exec exec, double t, const Vector& x, Vector& y) {
  y.setZero();
  const std::span<const Complex> xs(x.data(), static_cast<std::size_t>(x.size()));
  const std::span<Complex> ys(y.data(), static_cast<std::size_t>(y.size()));
  kernels::spmv(exec, h.static_part(), -kI, xs, ys);
  for (const auto& d : h.drives()) {
    const Complex c = d.coefficient(t);
    kernels::spmv(exec, d.op, -kI * c, xs, ys);
    kernels::spmv(exec, d.op_dagger, -kI * std::conj(c), xs, ys);
  }
}

void record_extra(ObservableSeries& obs, const std::vector<SparseOperator>& extra, const auto& state) {
  if (obs.extra.size() != extra.size()) obs.extra.resize(extra.size());
  for (std::size_t k = 0; k < extra.size(); ++k) obs.extra[k].push_back(expect(extra[k], state));
}

}  // namespace

TimeDependentHamiltonian effective_hamiltonian(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops) {
  SparseOperator s = h.static_part();
  for (const auto& c : c_ops) s = s + scale(dagger(c.op) * c.op, Complex(0.0, -0.5));
  return TimeDependentHamiltonian(std::move(s), h.drives());
}

// ---------------------------------------------------------------------------
// Master equation

MasterResult evolve_master(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                           const DensityMatrix& rho0, const TimeGrid& grid, const SpaceConfig& space,
                           const SolverOptions& opts) {
  check_dims(h, c_ops, rho0.dim(), space);
  rho0.validate();
  const auto times = grid.output_times();
  const TimeDependentHamiltonian heff = effective_hamiltonian(h, c_ops);
  const ObservableSet obs = ObservableSet::make(space);
  const kernels::Exec exec = opts.exec;
  const Index n = space.total_dim();

  DenseMatrix scratch = DenseMatrix::Zero(n, n);
  auto rhs = [&](double t, const DenseMatrix& rho, DenseMatrix& out) {
    out.setZero();
    kernels::spmm(exec, heff.static_part(), -kI, rho, out);
    for (const auto& d : heff.drives()) {
      const Complex c = d.coefficient(t);
      kernels::spmm(exec, d.op, -kI * c, rho, out);
      kernels::spmm(exec, d.op_dagger, -kI * std::conj(c), rho, out);
    }
    kernels::add_adjoint_in_place(exec, out);  // -i H_eff rho + i rho H_eff^dag
    for (const auto& c : c_ops) {
      scratch.setZero();
      kernels::spmm(exec, c.op, 1.0, rho, scratch);            // c rho
      kernels::spmm_adjoint(exec, c.op, 1.0, scratch, out);    // c (c rho)^dag = c rho c^dag
    }
  };

  MasterResult res;
  res.obs.reserve(times.size());
  res.trace.reserve(times.size());
  auto record = [&](double t, const DenseMatrix& rho) {
    res.obs.push(t, measure(obs, rho));
    record_extra(res.obs, opts.extra_observables, rho);
    const double tr = rho.trace().real();
    res.trace.push_back(tr);
    res.max_trace_drift = std::max(res.max_trace_drift, std::abs(tr - 1.0));
    res.max_hermiticity_defect =
        std::max(res.max_hermiticity_defect, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    if (opts.store_states) res.states.push_back(rho);
  };

  DormandPrince<DenseMatrix> ode(rhs, grid.integrator());
  ode.restart(times.front(), rho0.matrix());
  record(times.front(), rho0.matrix());
  for (std::size_t k = 1; k < times.size(); ++k) {
    ode.advance_to(times[k]);
    record(times[k], ode.state());
  }
  res.final_state = ode.state();
  return res;
}

// ---------------------------------------------------------------------------
// Trajectories

TrajectoryRecord evolve_trajectory(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                                   const PureState& psi0, const TimeGrid& grid, std::uint64_t seed,
                                   const SpaceConfig& space, const SolverOptions& opts) {
  check_dims(h, c_ops, psi0.dim(), space);
  if (!psi0.is_normalized()) throw InvariantError("initial trajectory state must be normalized");
  const auto times = grid.output_times();
  const TimeDependentHamiltonian heff = effective_hamiltonian(h, c_ops);
  const ObservableSet obs = ObservableSet::make(space);
  const kernels::Exec exec = opts.exec;

  TrajectoryRecord rec;
  rec.seed = seed;
  rec.obs.reserve(times.size());
  rec.jumps_per_sample.assign(times.size(), 0);

  auto sample = [&](double t, const Vector& psi) {
    rec.obs.push(t, measure(obs, psi));
    record_extra(rec.obs, opts.extra_observables, psi);
  };

  CounterRng rng(seed);
  double r = rng.uniform();
  std::vector<double> weights(c_ops.size());
  Vector jumped(psi0.dim());

  DormandPrince<Vector> ode([&](double t, const Vector& x, Vector& y) { apply_generator(heff, exec, t, x, y); },
                            grid.integrator());
  ode.restart(times.front(), psi0.amplitudes());
  sample(times.front(), psi0.amplitudes());

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double target = times[k];
    while (ode.time() < target) {
      ode.step(target);
      if (c_ops.empty()) continue;
      const double n2 = ode.state().squaredNorm();
      if (!std::isfinite(n2)) throw SolverError("non-finite trajectory state", ode.time());
      if (n2 > r) continue;

      // norm^2 > r at lo, <= r at hi
      double lo = ode.previous_time();
      double hi = ode.time();
      const double tol = 1e-10 * std::max(1.0, std::abs(hi));
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (ode.dense(mid).squaredNorm() > r) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      ode.reintegrate_to(hi);
      const Vector& psi = ode.state();

      double total = 0.0;
      for (std::size_t c = 0; c < c_ops.size(); ++c) {
        weights[c] = c_ops[c].op.apply(psi).squaredNorm();
        total += weights[c];
      }
      if (!(total > 0.0)) throw SolverError("norm decayed but no collapse channel is populated", hi);
      const double u = rng.uniform() * total;
      std::size_t chosen = 0;
      double acc = weights[0];
      while (acc < u && chosen + 1 < c_ops.size()) acc += weights[++chosen];

      jumped = c_ops[chosen].op.apply(psi);
      jumped /= std::sqrt(weights[chosen]);
      rec.jumps.push_back({hi, c_ops[chosen].channel});
      ++rec.jumps_per_sample[k];
      ode.restart(hi, jumped);
      r = rng.uniform();
    }
    sample(target, ode.state());
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Ensembles

namespace {

template <class Series>
auto views(Series& s) {
  return std::array{&s.sx, &s.sy, &s.sz, &s.q, &s.p, &s.re_a, &s.im_a, &s.n_cav, &s.n_mech};
}

class SeriesAccumulator {
 public:
  explicit SeriesAccumulator(std::size_t samples, std::size_t n_extra)
      : mean_(kFields, std::vector<double>(samples, 0.0)),
        m2_(kFields, std::vector<double>(samples, 0.0)),
        extra_mean_(2 * n_extra, std::vector<double>(samples, 0.0)),
        extra_m2_(2 * n_extra, std::vector<double>(samples, 0.0)) {}

  // Welford update; callers feed trajectories in seed order.
  void add(const ObservableSeries& s) {
    ++n_;
    const double inv = 1.0 / static_cast<double>(n_);
    const auto fields = views(s);
    for (std::size_t f = 0; f < kFields; ++f) update(mean_[f], m2_[f], *fields[f], inv);
    for (std::size_t e = 0; e < extra_mean_.size() / 2; ++e) {
      std::vector<double> re(s.extra[e].size()), im(s.extra[e].size());
      for (std::size_t k = 0; k < re.size(); ++k) {
        re[k] = s.extra[e][k].real();
        im[k] = s.extra[e][k].imag();
      }
      update(extra_mean_[2 * e], extra_m2_[2 * e], re, inv);
      update(extra_mean_[2 * e + 1], extra_m2_[2 * e + 1], im, inv);
    }
  }

  void finish(const std::vector<double>& times, ObservableSeries& mean, ObservableSeries& err) const {
    mean = ObservableSeries{};
    err = ObservableSeries{};
    mean.times = err.times = times;
    auto mv = views(mean);
    auto ev = views(err);
    const double n = static_cast<double>(n_);
    for (std::size_t f = 0; f < kFields; ++f) {
      *mv[f] = mean_[f];
      *ev[f] = standard_error(m2_[f], n);
    }
    const std::size_t n_extra = extra_mean_.size() / 2;
    mean.extra.resize(n_extra);
    err.extra.resize(n_extra);
    for (std::size_t e = 0; e < n_extra; ++e) {
      const auto se_re = standard_error(extra_m2_[2 * e], n);
      const auto se_im = standard_error(extra_m2_[2 * e + 1], n);
      for (std::size_t k = 0; k < times.size(); ++k) {
        mean.extra[e].emplace_back(extra_mean_[2 * e][k], extra_mean_[2 * e + 1][k]);
        err.extra[e].emplace_back(se_re[k], se_im[k]);
      }
    }
  }

 private:
  static constexpr std::size_t kFields = 9;

  static void update(std::vector<double>& mean, std::vector<double>& m2, const std::vector<double>& x, double inv) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = x[k] - mean[k];
      mean[k] += d * inv;
      m2[k] += d * (x[k] - mean[k]);
    }
  }

  static std::vector<double> standard_error(const std::vector<double>& m2, double n) {
    std::vector<double> out(m2.size(), 0.0);
    if (n < 2.0) return out;
    for (std::size_t k = 0; k < m2.size(); ++k) out[k] = std::sqrt(std::max(m2[k], 0.0) / (n - 1.0) / n);
    return out;
  }

  std::size_t n_ = 0;
  std::vector<std::vector<double>> mean_, m2_;
  std::vector<std::vector<double>> extra_mean_, extra_m2_;
};

EnsembleRecord ensemble_impl(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                             const PureState& psi0, const TimeGrid& grid, std::size_t n_traj,
                             std::uint64_t base_seed, const SpaceConfig& space, const EnsembleOptions& opts,
                             int threads) {
  if (n_traj < 1) throw InvariantError("an ensemble needs n_traj >= 1");
  const auto times = grid.output_times();
  check_dims(h, c_ops, psi0.dim(), space);

  EnsembleRecord out;
  out.n_traj = n_traj;
  out.jumps_per_sample.assign(times.size(), 0);
  SeriesAccumulator acc(times.size(), opts.solver.extra_observables.size());

  const std::size_t block = std::max<std::size_t>(16, 4 * static_cast<std::size_t>(threads));
  std::vector<TrajectoryRecord> batch;
  for (std::size_t first = 0; first < n_traj; first += block) {
    const std::size_t count = std::min(block, n_traj - first);
    batch.assign(count, TrajectoryRecord{});
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<std::ptrdiff_t>(count);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads > 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        batch[i] = evolve_trajectory(h, c_ops, psi0, grid, base_seed + first + static_cast<std::uint64_t>(i), space,
                                     opts.solver);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }

    for (std::size_t i = 0; i < count; ++i) {
      if (!errors[i]) continue;
      const std::uint64_t seed = base_seed + first + i;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const SolverError& e) {
        throw SolverError("trajectory seed=" + std::to_string(seed) + ": " + e.what(), e.time());
      } catch (const std::exception& e) {
        throw SolverError("trajectory seed=" + std::to_string(seed) + ": " + e.what(), grid.t_start);
      }
    }

    for (auto& rec : batch) {
      out.seeds.push_back(rec.seed);
      acc.add(rec.obs);
      for (std::size_t k = 0; k < times.size(); ++k) out.jumps_per_sample[k] += rec.jumps_per_sample[k];
      if (opts.keep_records) out.records.push_back(std::move(rec));
    }
  }
  acc.finish(times, out.mean, out.std_error);
  return out;
}

}  // namespace

EnsembleRecord run_ensemble(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                            const PureState& psi0, const TimeGrid& grid, std::size_t n_traj,
                            std::uint64_t base_seed, const SpaceConfig& space, const EnsembleOptions& opts) {
  const int threads = opts.threads > 0 ? opts.threads : kernels::thread_budget();
  return ensemble_impl(h, c_ops, psi0, grid, n_traj, base_seed, space, opts, threads);
}

EnsembleRecord run_ensemble_serial(const TimeDependentHamiltonian& h, const std::vector<Collapse>& c_ops,
                                   const PureState& psi0, const TimeGrid& grid, std::size_t n_traj,
                                   std::uint64_t base_seed, const SpaceConfig& space, const EnsembleOptions& opts) {
  return ensemble_impl(h, c_ops, psi0, grid, n_traj, base_seed, space, opts, 1);
}

// ---------------------------------------------------------------------------
// Closed-system reference

ReferenceResult schroedinger_reference(const TimeDependentHamiltonian& h, const PureState& psi0, const TimeGrid& grid,
                                       const SpaceConfig& space, double ref_step, const SolverOptions& opts) {
  check_dims(h, {}, psi0.dim(), space);
  if (!(ref_step > 0.0)) throw InvariantError("ref_step must be > 0");
  const auto times = grid.output_times();
  const ObservableSet obs = ObservableSet::make(space);

  ReferenceResult res;
  Vector psi = psi0.amplitudes();
  const Index n = psi.size();
  Vector k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto f = [&](double t, const Vector& x, Vector& y) { apply_generator(h, opts.exec, t, x, y); };
  auto record = [&](double t) {
    res.obs.push(t, measure(obs, psi));
    record_extra(res.obs, opts.extra_observables, psi);
    res.norm2.push_back(psi.squaredNorm());
  };

  record(times.front());
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t0 = times[k - 1];
    const double span = times[k] - t0;
    const auto substeps = static_cast<long>(std::ceil(span / ref_step - 1e-9));
    const double dt = span / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) {
      const double t = t0 + static_cast<double>(s) * dt;
      f(t, psi, k1);
      tmp = psi + (0.5 * dt) * k1;
      f(t + 0.5 * dt, tmp, k2);
      tmp = psi + (0.5 * dt) * k2;
      f(t + 0.5 * dt, tmp, k3);
      tmp = psi + dt * k3;
      f(t + dt, tmp, k4);
      psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    record(times[k]);
  }
  res.final_state = psi;
  return res;
}

}  // namespace oemsync
