#pragma once

// Run configuration: a plain key=value text format with [section] headers.
//
//   # comment
//   preset = paper_fig2        (allowed anywhere; resets [params] to the preset)
//   [system]   n_mech, n_cav
//   [params]   E_J g_q omega_m Delta g_o A_lp A_lr Omega kappa gamma epsilon
//              mech_drive_amp mech_drive_freq   (cavity-free model; default A_lr, Omega)
//   [initial]  qubit_state = ground | excited | plus_x | custom(c0,c1), mech_fock, cav_fock
//   [run]      mode = trajectory | ensemble | master | qm_only | validate,
//              t_max dt_out n_traj seed rel_tol abs_tol max_step,
//              sample_rule = uniform | golden_strobe
//   [analysis] branch_threshold min_dwell
//   [output]   csv_path svg_path figure
//
// Whitespace around keys and values is ignored. Keys not listed are errors.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "oemsync/analysis.hpp"
#include "oemsync/linalg.hpp"
#include "oemsync/model.hpp"

namespace oemsync {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class RunMode { trajectory, ensemble, master, qm_only, validate };

struct QubitInit {
  enum class Kind { ground, excited, plus_x, custom } kind = Kind::plus_x;
  double c0 = 1.0;  // custom amplitudes, normalized on use
  double c1 = 1.0;

  Complex amp0() const;
  Complex amp1() const;
};

struct RunConfig {
  Index n_mech = 15;
  Index n_cav = 10;

  ModelParams params = ModelParams::paper_fig2();
  std::optional<double> mech_drive_amp;
  std::optional<double> mech_drive_freq;

  QubitInit qubit_state;
  Index mech_fock = 0;
  Index cav_fock = 0;

  RunMode mode = RunMode::trajectory;
  double t_max = 200.0;
  double dt_out = 0.1;
  std::size_t n_traj = 100;
  std::uint64_t seed = 1;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::optional<double> max_step;
  SampleRule sample_rule = SampleRule::uniform;

  double branch_threshold = 0.1;
  double min_dwell = 20.0 * 3.14159265358979323846;

  std::string csv_path = "oem_sync.csv";
  std::string svg_path;
  std::string figure;  // empty: a per-mode default

  MechDrive mech_drive() const;
};

std::string to_string(RunMode m);
std::string to_string(SampleRule r);
std::string to_string(const QubitInit& q);

/// Parses config text on top of `base`. Throws ConfigError with the line number.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Cross-field checks (Fock indices inside truncations, ...). Throws ConfigError.
void validate(const RunConfig& c);

/// Canonical text of a fully resolved config; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& c);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);
bool parse_double(std::string_view s, double& out);

}  // namespace oemsync
