#include "oemsync/model.hpp"

#include <cmath>

#include "oemsync/errors.hpp"

namespace oemsync {

ModelParams ModelParams::paper_fig2() {
  ModelParams p;
  p.E_J = 1.2;
  p.g_q = 0.04;
  p.omega_m = 1.0;
  p.Delta = 1.0;
  p.g_o = 0.38;
  p.A_lp = 0.6;
  p.A_lr = 0.08;
  p.Omega = 1.0;
  p.kappa = 1.4;
  p.gamma = 0.015;
  p.epsilon = 0.0;
  return p;
}

void ModelParams::validate() const {
  const double all[] = {E_J, g_q, omega_m, Delta, g_o, A_lp, A_lr, Omega, kappa, gamma, epsilon};
  for (double v : all)
    if (!std::isfinite(v)) throw InvariantError("model parameters must be finite");
  if (!(omega_m > 0.0)) throw InvariantError("omega_m must be > 0");
  if (kappa < 0.0) throw InvariantError("kappa must be >= 0");
  if (gamma < 0.0) throw InvariantError("gamma must be >= 0");
  if (A_lp < 0.0) throw InvariantError("A_lp must be >= 0");
  if (A_lr < 0.0) throw InvariantError("A_lr must be >= 0");
}

DriveTerm::DriveTerm(SparseOperator o, std::function<Complex(double)> c)
    : op(std::move(o)), op_dagger(dagger(op)), coefficient(std::move(c)) {}

SparseOperator DriveTerm::at(double t) const {
  const Complex c = coefficient(t);
  return scale(op, c) + scale(op_dagger, std::conj(c));
}

TimeDependentHamiltonian::TimeDependentHamiltonian(SparseOperator static_part, std::vector<DriveTerm> drives)
    : static_part_(std::move(static_part)) {
  for (auto& d : drives) add_drive(std::move(d));
}

void TimeDependentHamiltonian::add_drive(DriveTerm d) {
  if (d.op.dim() != static_part_.dim()) throw DimensionError("drive operator dimension mismatch");
  drives_.push_back(std::move(d));
}

SparseOperator TimeDependentHamiltonian::at(double t) const {
  SparseOperator h = static_part_;
  for (const auto& d : drives_) h = h + d.at(t);
  return h;
}

std::string to_string(Channel c) { return c == Channel::cavity ? "cavity" : "mech"; }

namespace {

struct Ops {
  SparseOperator sx, sz, b, bdag, a, adag, id;
};

Ops embedded_ops(const SpaceConfig& s) {
  Ops o;
  o.sx = embed(pauli(Axis::x), Slot::qubit, s);
  o.sz = embed(pauli(Axis::z), Slot::qubit, s);
  o.b = embed(annihilation(s.n_mech), Slot::mech, s);
  o.bdag = dagger(o.b);
  if (s.has_cavity()) {
    o.a = embed(annihilation(s.n_cav), Slot::cav, s);
    o.adag = dagger(o.a);
  }
  o.id = SparseOperator::identity(s.total_dim());
  return o;
}

// omega_m b^dag b - Delta a^dag a - g_o a^dag a (b^dag + b) + i A_lp (a^dag - a)
SparseOperator mech_and_cavity_terms(const ModelParams& p, const SpaceConfig& s, const Ops& o) {
  SparseOperator h = scale(o.bdag * o.b, p.omega_m);
  if (s.has_cavity()) {
    const SparseOperator na = o.adag * o.a;
    h = h + scale(na, -p.Delta);
    h = h + scale(na * (o.bdag + o.b), -p.g_o);
    h = h + scale(o.adag - o.a, kI * p.A_lp);
  }
  return h;
}

}  // namespace

SparseOperator build_static_hamiltonian(const ModelParams& p, const SpaceConfig& s) {
  const Ops o = embedded_ops(s);
  SparseOperator h = scale(o.sz, -0.5 * p.epsilon) + scale(o.sx, -0.5 * p.E_J);
  h = h + scale((o.bdag + o.b) * o.sz, p.g_q);
  return h + mech_and_cavity_terms(p, s, o);
}

DriveTerm build_reference_drive(const ModelParams& p, const SpaceConfig& s) {
  if (p.A_lr < 0.0) throw InvariantError("A_lr must be >= 0");
  if (!s.has_cavity()) throw DimensionError("reference drive needs a cavity factor");
  const SparseOperator adag = dagger(embed(annihilation(s.n_cav), Slot::cav, s));
  const double amp = p.A_lr;
  const double omega = p.Omega;
  return DriveTerm(adag, [amp, omega](double t) { return kI * amp * std::exp(-kI * (omega * t)); });
}

TimeDependentHamiltonian build_total_hamiltonian(const ModelParams& p, const SpaceConfig& s) {
  p.validate();
  TimeDependentHamiltonian h(build_static_hamiltonian(p, s));
  if (s.has_cavity()) h.add_drive(build_reference_drive(p, s));
  return h;
}

std::vector<Collapse> collapse_operators(const ModelParams& p, const SpaceConfig& s) {
  if (p.kappa < 0.0 || p.gamma < 0.0) throw InvariantError("collapse rates must be >= 0");
  std::vector<Collapse> out;
  if (p.kappa > 0.0 && s.has_cavity()) {
    out.push_back({Channel::cavity, scale(embed(annihilation(s.n_cav), Slot::cav, s), std::sqrt(p.kappa))});
  }
  if (p.gamma > 0.0) {
    out.push_back({Channel::mech, scale(embed(annihilation(s.n_mech), Slot::mech, s), std::sqrt(p.gamma))});
  }
  return out;
}

double mixing_angle(const ModelParams& p) {
  if (p.E_J == 0.0 && p.epsilon == 0.0) throw InvariantError("mixing angle undefined for E_J = epsilon = 0");
  return std::atan2(p.epsilon, p.E_J);
}

SparseOperator build_rotated_hamiltonian(const ModelParams& p, const SpaceConfig& s) {
  const double angle = mixing_angle(p);
  const Ops o = embedded_ops(s);
  const double c = std::cos(angle);
  const double sn = std::sin(angle);
  const double splitting = std::hypot(p.epsilon, p.E_J);
  SparseOperator h = scale(o.sz, 0.5 * splitting);
  h = h + scale((o.bdag + o.b) * (scale(o.sx, c) - scale(o.sz, sn)), p.g_q);
  return h + mech_and_cavity_terms(p, s, o);
}

TimeDependentHamiltonian build_qm_only(const ModelParams& p, const SpaceConfig& s, std::optional<MechDrive> mech_drive) {
  const Ops o = embedded_ops(s);
  SparseOperator h = scale(o.sz, -0.5 * p.epsilon) + scale(o.sx, -0.5 * p.E_J);
  h = h + scale((o.bdag + o.b) * o.sz, p.g_q);
  h = h + scale(o.bdag * o.b, p.omega_m);
  TimeDependentHamiltonian out(std::move(h));
  if (mech_drive && mech_drive->amplitude != 0.0) {
    const double amp = mech_drive->amplitude;
    const double freq = mech_drive->frequency;
    out.add_drive(DriveTerm(o.bdag, [amp, freq](double t) { return amp * std::exp(-kI * (freq * t)); }));
  }
  return out;
}

ObservableSet ObservableSet::make(const SpaceConfig& s) {
  ObservableSet o;
  o.sx = embed(pauli(Axis::x), Slot::qubit, s);
  o.sy = embed(pauli(Axis::y), Slot::qubit, s);
  o.sz = embed(pauli(Axis::z), Slot::qubit, s);
  o.b = embed(annihilation(s.n_mech), Slot::mech, s);
  o.nb = embed(number(s.n_mech), Slot::mech, s);
  if (s.has_cavity()) {
    o.a = embed(annihilation(s.n_cav), Slot::cav, s);
    o.na = embed(number(s.n_cav), Slot::cav, s);
  } else {
    o.a = SparseOperator::zero(s.total_dim());
    o.na = SparseOperator::zero(s.total_dim());
  }
  return o;
}

}  // namespace oemsync
