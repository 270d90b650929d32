#include "oemsync/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "oemsync/csv_io.hpp"
#include "oemsync/errors.hpp"
#include "oemsync/svg.hpp"

namespace oemsync {

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string opt(const std::optional<double>& v, int digits = 3) { return v ? fixed(*v, digits) : "n/a"; }

std::optional<double> sync_in(const PhaseSeries& a, const std::vector<double>& drive, const DwellInterval& iv) {
  try {
    return sync_order(slice(a, iv.first, iv.last), slice(drive, iv.first, iv.last));
  } catch (const InvariantError&) {
    return std::nullopt;
  }
}

const DwellInterval* longest(const std::vector<DwellInterval>& ivs, Branch b) {
  const DwellInterval* best = nullptr;
  for (const auto& iv : ivs)
    if (iv.label == b && (!best || iv.duration() > best->duration())) best = &iv;
  return best;
}

double time_average(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(b - a) / scale : 0.0;
}

std::vector<std::string> config_lines(const RunConfig& cfg) {
  std::vector<std::string> out;
  std::istringstream in(to_text(cfg));
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

BranchOptions branch_options(const RunConfig& cfg) { return {cfg.branch_threshold, cfg.min_dwell}; }

FigureKind default_figure(RunMode m) {
  switch (m) {
    case RunMode::trajectory: return FigureKind::timeseries_sx;
    case RunMode::ensemble: return FigureKind::ensemble_decay;
    case RunMode::master: return FigureKind::timeseries_sx;
    case RunMode::qm_only: return FigureKind::bloch_projection;
    case RunMode::validate: return FigureKind::ensemble_decay;
  }
  return FigureKind::timeseries_sx;
}

void finish(const RunConfig& cfg, CsvDocument& doc, const std::string& summary, FigureInput fig, RunOutcome& out) {
  doc.header_lines.push_back("## summary: " + summary);
  write_csv(doc, cfg.csv_path);
  out.artifacts.push_back(cfg.csv_path);
  if (!cfg.svg_path.empty()) {
    const FigureKind kind = cfg.figure.empty() ? default_figure(cfg.mode) : parse_figure_kind(cfg.figure);
    if (kind == FigureKind::phase_vs_phase && !fig.phases) fig.phases = phase_record(fig.obs, cfg.params.Omega);
    emit_figure(kind, fig, cfg.svg_path);
    out.artifacts.push_back(cfg.svg_path);
  }
  out.summary = summary;
}

CsvDocument header(const RunConfig& cfg, const SpaceConfig& space) {
  CsvDocument doc;
  doc.header_lines = config_lines(cfg);
  doc.header_lines.push_back("## mode=" + to_string(cfg.mode) + " seed=" + std::to_string(cfg.seed) +
                             " dim=" + std::to_string(space.total_dim()));
  return doc;
}

RunOutcome run_trajectory(const RunConfig& cfg) {
  const SpaceConfig space = SpaceConfig::make(cfg.n_mech, cfg.n_cav);
  const auto h = build_total_hamiltonian(cfg.params, space);
  const auto c_ops = collapse_operators(cfg.params, space);
  TrajectoryRecord rec = evolve_trajectory(h, c_ops, initial_state(cfg, space), time_grid(cfg), cfg.seed, space);
  rec = stroboscopic_sample(rec, cfg.params.Omega, cfg.sample_rule);

  const double late = std::min(500.0, cfg.t_max / 2);
  const TrajectorySummary ts = summarize_trajectory(rec.obs, cfg.params.Omega, branch_options(cfg), late);
  rec.branch = ts.labeling.labels;

  CsvDocument doc = header(cfg, space);
  doc.header_lines.push_back("## jumps=" + std::to_string(rec.jumps.size()));
  doc.rows = make_rows(rec.obs, cfg.params.Omega, rec.branch, rec.jumps_per_sample);
  RunOutcome out;
  finish(cfg, doc, "trajectory: " + to_string(ts), {rec.obs, rec.branch, std::nullopt, std::nullopt}, out);
  return out;
}

RunOutcome run_ensemble_mode(const RunConfig& cfg) {
  const SpaceConfig space = SpaceConfig::make(cfg.n_mech, cfg.n_cav);
  const auto h = build_total_hamiltonian(cfg.params, space);
  const auto c_ops = collapse_operators(cfg.params, space);
  const EnsembleRecord ens =
      run_ensemble(h, c_ops, initial_state(cfg, space), time_grid(cfg), cfg.n_traj, cfg.seed, space);

  const PhaseRecord ph = phase_record(ens.mean, cfg.params.Omega);
  std::string summary = "ensemble: n_traj=" + std::to_string(ens.n_traj);
  try {
    summary += " sync(phi_mean,drive)=" + fixed(sync_order(ph.phi, ph.drive_phase));
  } catch (const InvariantError&) {
    summary += " sync(phi_mean,drive)=n/a";
  }
  try {
    summary += " sync(psi_mean,drive)=" + fixed(sync_order(ph.psi, ph.drive_phase));
  } catch (const InvariantError&) {
    summary += " sync(psi_mean,drive)=n/a";
  }
  double late_max = 0.0;
  for (std::size_t k = 0; k < ens.mean.size(); ++k)
    if (ens.mean.times[k] > cfg.t_max / 2) late_max = std::max(late_max, std::abs(ens.mean.sx[k]));
  summary += " max|sx_mean|(t>" + fixed(cfg.t_max / 2, 1) + ")=" + fixed(late_max);

  CsvDocument doc = header(cfg, space);
  doc.rows = make_rows(ens.mean, cfg.params.Omega, {}, ens.jumps_per_sample);
  append_ensemble_columns(doc, ens.mean, ens.std_error);
  RunOutcome out;
  finish(cfg, doc, summary, {ens.mean, {}, std::nullopt, ens.std_error}, out);
  return out;
}

RunOutcome run_master_mode(const RunConfig& cfg) {
  const SpaceConfig space = SpaceConfig::make(cfg.n_mech, cfg.n_cav);
  const auto h = build_total_hamiltonian(cfg.params, space);
  const auto c_ops = collapse_operators(cfg.params, space);
  const MasterResult res = evolve_master(h, c_ops, DensityMatrix::from_pure(initial_state(cfg, space)),
                                         time_grid(cfg), space);
  const auto& o = res.obs;
  const std::string summary = "master: max_trace_drift=" + fixed(res.max_trace_drift, 12) +
                              " final n_cav=" + fixed(o.n_cav.back(), 6) + " n_mech=" + fixed(o.n_mech.back(), 6) +
                              " sx=" + fixed(o.sx.back(), 6);
  CsvDocument doc = header(cfg, space);
  doc.rows = make_rows(o, cfg.params.Omega, {}, {});
  RunOutcome out;
  finish(cfg, doc, summary, {o, {}, std::nullopt, std::nullopt}, out);
  return out;
}

RunOutcome run_qm_only(const RunConfig& cfg) {
  const SpaceConfig space = SpaceConfig::qubit_mech(cfg.n_mech);
  const MechDrive drive = cfg.mech_drive();
  const auto h = build_qm_only(cfg.params, space, drive);
  const auto c_ops = collapse_operators(cfg.params, space);
  TrajectoryRecord rec = evolve_trajectory(h, c_ops, initial_state(cfg, space), time_grid(cfg), cfg.seed, space);
  rec = stroboscopic_sample(rec, drive.frequency, cfg.sample_rule);

  const QubitPhases rot =
      rotated_qubit_phases(to_rotated_bloch(bloch_of(rec.obs), mixing_angle(cfg.params)));
  const auto dphase = drive_phase(rec.obs.times, drive.frequency);
  const PhaseSeries psi = mech_phase(quadratures(rec.obs));
  std::string summary = "qm_only: jumps=" + std::to_string(rec.jumps.size());
  const auto sync = [&](const PhaseSeries& a) -> std::string {
    try {
      return fixed(sync_order(a, dphase));
    } catch (const InvariantError&) {
      return "n/a";
    }
  };
  summary += " sync(phi',drive)=" + sync(rot.phi) + " sync(theta',drive)=" + sync(rot.theta) +
             " sync(psi,drive)=" + sync(psi) + " mean n_mech=" + fixed(time_average(rec.obs.n_mech));

  CsvDocument doc = header(cfg, space);
  doc.rows = make_rows(rec.obs, drive.frequency, {}, rec.jumps_per_sample);
  RunOutcome out;
  finish(cfg, doc, summary, {rec.obs, {}, std::nullopt, std::nullopt}, out);
  return out;
}

RunOutcome run_validate_mode(const RunConfig& cfg) {
  const ValidationReport rep = run_validation(cfg);
  const std::string summary = std::string("validate: ") + (rep.passed() ? "PASS" : "FAIL") +
                              " rel_change n_mech=" + fixed(rep.rel_n_mech, 4) + " (" + fixed(rep.n_mech_base, 4) +
                              " -> " + fixed(rep.n_mech_doubled, 4) + ") n_cav=" + fixed(rep.rel_n_cav, 4) + " (" +
                              fixed(rep.n_cav_base, 4) + " -> " + fixed(rep.n_cav_doubled, 4) +
                              ") tolerance=" + fixed(rep.tolerance, 2);
  CsvDocument doc = header(cfg, rep.base);
  doc.header_lines.push_back("## doubled truncation n_mech=" + std::to_string(rep.doubled.n_mech) +
                             " n_cav=" + std::to_string(rep.doubled.n_cav));
  const auto& ens = rep.base_run;
  doc.rows = make_rows(ens.mean, cfg.params.Omega, {}, ens.jumps_per_sample);
  append_ensemble_columns(doc, ens.mean, ens.std_error);
  RunOutcome out;
  finish(cfg, doc, summary, {ens.mean, {}, std::nullopt, ens.std_error}, out);
  out.exit_code = rep.passed() ? 0 : 1;
  return out;
}

}  // namespace

TrajectorySummary summarize_trajectory(const ObservableSeries& obs, double omega, const BranchOptions& branch,
                                       double late_start) {
  TrajectorySummary s;
  if (obs.size() == 0) return s;
  s.labeling = classify_branches(obs.times, obs.sx, branch);

  double blue_sum = 0.0, red_sum = 0.0;
  std::size_t blue_n = 0, red_n = 0;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (s.labeling.labels[k] == Branch::blue) blue_sum += obs.sx[k], ++blue_n;
    if (s.labeling.labels[k] == Branch::red) red_sum += obs.sx[k], ++red_n;
  }
  if (blue_n) s.blue_mean_sx = blue_sum / static_cast<double>(blue_n);
  if (red_n) s.red_mean_sx = red_sum / static_cast<double>(red_n);

  for (const auto& iv : s.labeling.dwell_intervals) {
    (iv.label == Branch::blue ? s.blue_dwells : s.red_dwells) += 1;
    s.shortest_dwell = (s.blue_dwells + s.red_dwells == 1) ? iv.duration() : std::min(s.shortest_dwell, iv.duration());
  }

  const PhaseRecord ph = phase_record(obs, omega);
  if (const auto* iv = longest(s.labeling.dwell_intervals, Branch::blue)) {
    s.blue_sync_phi = sync_in(ph.phi, ph.drive_phase, *iv);
    s.blue_sync_psi = sync_in(ph.psi, ph.drive_phase, *iv);
  }
  if (const auto* iv = longest(s.labeling.dwell_intervals, Branch::red)) {
    s.red_sync_phi = sync_in(ph.phi, ph.drive_phase, *iv);
    s.red_sync_psi = sync_in(ph.psi, ph.drive_phase, *iv);
  }

  std::vector<double> q, p, nb;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (obs.times[k] <= late_start) continue;
    q.push_back(obs.q[k]);
    p.push_back(obs.p[k]);
    nb.push_back(obs.n_mech[k]);
  }
  if (!nb.empty()) s.late_mean_n_mech = time_average(nb);
  if (q.size() >= 10) s.late_cycle = limit_cycle_stats(q, p);
  return s;
}

std::string to_string(const TrajectorySummary& s) {
  std::string out = "dwells blue=" + std::to_string(s.blue_dwells) + " red=" + std::to_string(s.red_dwells);
  out += " mean_sx blue=" + opt(s.blue_mean_sx) + " red=" + opt(s.red_mean_sx);
  out += " shortest_dwell=" + fixed(s.shortest_dwell, 1);
  out += " sync(phi,drive) blue=" + opt(s.blue_sync_phi) + " red=" + opt(s.red_sync_phi);
  out += " sync(psi,drive) blue=" + opt(s.blue_sync_psi) + " red=" + opt(s.red_sync_psi);
  out += " late n_mech=" + opt(s.late_mean_n_mech);
  out += " radius=" + (s.late_cycle ? fixed(s.late_cycle->mean_radius) : std::string("n/a"));
  return out;
}

ValidationReport run_validation(const RunConfig& cfg) {
  ValidationReport rep;
  rep.base = SpaceConfig::make(cfg.n_mech, cfg.n_cav);
  rep.doubled = SpaceConfig::make(2 * cfg.n_mech, 2 * cfg.n_cav);
  const TimeGrid grid = time_grid(cfg);

  const auto ensemble_at = [&](const SpaceConfig& space) {
    const auto h = build_total_hamiltonian(cfg.params, space);
    const auto c_ops = collapse_operators(cfg.params, space);
    return run_ensemble(h, c_ops, initial_state(cfg, space), grid, cfg.n_traj, cfg.seed, space);
  };
  rep.base_run = ensemble_at(rep.base);
  const EnsembleRecord doubled = ensemble_at(rep.doubled);

  rep.n_mech_base = time_average(rep.base_run.mean.n_mech);
  rep.n_cav_base = time_average(rep.base_run.mean.n_cav);
  rep.n_mech_doubled = time_average(doubled.mean.n_mech);
  rep.n_cav_doubled = time_average(doubled.mean.n_cav);
  rep.rel_n_mech = relative_change(rep.n_mech_base, rep.n_mech_doubled);
  rep.rel_n_cav = relative_change(rep.n_cav_base, rep.n_cav_doubled);
  return rep;
}

PureState initial_state(const RunConfig& cfg, const SpaceConfig& space) {
  return PureState::product(space, cfg.qubit_state.amp0(), cfg.qubit_state.amp1(), cfg.mech_fock,
                            space.has_cavity() ? cfg.cav_fock : 0);
}

TimeGrid time_grid(const RunConfig& cfg) {
  TimeGrid g;
  g.t_start = 0.0;
  g.t_end = cfg.t_max;
  g.dt_out = cfg.dt_out;
  g.rel_tol = cfg.rel_tol;
  g.abs_tol = cfg.abs_tol;
  if (cfg.max_step) g.max_step = *cfg.max_step;
  return g;
}

RunOutcome run(const RunConfig& cfg) {
  validate(cfg);
  switch (cfg.mode) {
    case RunMode::trajectory: return run_trajectory(cfg);
    case RunMode::ensemble: return run_ensemble_mode(cfg);
    case RunMode::master: return run_master_mode(cfg);
    case RunMode::qm_only: return run_qm_only(cfg);
    case RunMode::validate: return run_validate_mode(cfg);
  }
  return {};
}

}  // namespace oemsync
