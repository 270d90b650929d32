#pragma once

// Hamiltonians and collapse operators of the hybrid qubit / mechanics / cavity
// system, written in the frame rotating with the primary laser. All rates are
// in units of the mechanical frequency omega_m.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oemsync/linalg.hpp"

namespace oemsync {

struct ModelParams {
  double E_J = 0.0;
  double g_q = 0.0;
  double omega_m = 1.0;
  double Delta = 0.0;
  double g_o = 0.0;
  double A_lp = 0.0;
  double A_lr = 0.0;
  double Omega = 0.0;
  double kappa = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;  // charge bias; 0 is the sweet point

  /// (E_J, g_q, Delta, g_o, A_lp, A_lr, Omega, kappa, gamma) =
  /// (1.2, 0.04, 1.0, 0.38, 0.6, 0.08, 1.0, 1.4, 0.015) * omega_m
  static ModelParams paper_fig2();

  /// Throws InvariantError on omega_m <= 0, negative rates or negative drive amplitudes.
  void validate() const;
};

/// Coherent drive on the mechanics for the cavity-free model:
/// amplitude * (b^dagger e^{-i frequency t} + b e^{i frequency t}).
struct MechDrive {
  double amplitude = 0.0;
  double frequency = 0.0;
};

/// c(t) * op + conj(c(t)) * op^dagger
struct DriveTerm {
  SparseOperator op;
  SparseOperator op_dagger;
  std::function<Complex(double)> coefficient;

  DriveTerm(SparseOperator o, std::function<Complex(double)> c);
  SparseOperator at(double t) const;
};

/// H(t) = static_part + sum over drive terms. The static part may be
/// non-Hermitian (effective Hamiltonians of the trajectory method).
class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian() = default;
  explicit TimeDependentHamiltonian(SparseOperator static_part, std::vector<DriveTerm> drives = {});

  Index dim() const { return static_part_.dim(); }
  const SparseOperator& static_part() const { return static_part_; }
  const std::vector<DriveTerm>& drives() const { return drives_; }

  void add_drive(DriveTerm d);
  SparseOperator at(double t) const;

 private:
  SparseOperator static_part_;
  std::vector<DriveTerm> drives_;
};

enum class Channel { cavity, mech };
std::string to_string(Channel c);

struct Collapse {
  Channel channel;
  SparseOperator op;
};

/// -(eps/2) sz - (E_J/2) sx + g_q (b^dag + b) sz + omega_m b^dag b
///   - Delta a^dag a - g_o a^dag a (b^dag + b) + i A_lp (a^dag - a)
/// Cavity terms are omitted on a space without a cavity factor.
SparseOperator build_static_hamiltonian(const ModelParams& p, const SpaceConfig& s);

/// i A_lr (a^dag e^{-i Omega t} - a e^{i Omega t})
DriveTerm build_reference_drive(const ModelParams& p, const SpaceConfig& s);

/// Static part plus the reference drive.
TimeDependentHamiltonian build_total_hamiltonian(const ModelParams& p, const SpaceConfig& s);

/// [sqrt(kappa) a, sqrt(gamma) b]; zero-rate channels (and the cavity channel
/// on a cavity-free space) are omitted.
std::vector<Collapse> collapse_operators(const ModelParams& p, const SpaceConfig& s);

/// Mixing angle of the qubit eigenbasis, tan(angle) = epsilon / E_J.
double mixing_angle(const ModelParams& p);

/// Hamiltonian written in the qubit eigenbasis (primed Pauli matrices):
/// (sqrt(eps^2 + E_J^2)/2) sz' + g_q (b^dag + b)(sx' cos - sz' sin) + H_m + H_om.
SparseOperator build_rotated_hamiltonian(const ModelParams& p, const SpaceConfig& s);

/// Qubit + mechanics without the cavity, optionally with a coherent phonon drive.
TimeDependentHamiltonian build_qm_only(const ModelParams& p, const SpaceConfig& s,
                                       std::optional<MechDrive> mech_drive = std::nullopt);

/// Embedded operators the solvers record at every output time.
struct ObservableSet {
  SparseOperator sx, sy, sz;
  SparseOperator b, nb;
  SparseOperator a, na;  // zero operators when the space has no cavity

  static ObservableSet make(const SpaceConfig& s);
};

}  // namespace oemsync
