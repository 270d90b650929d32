#include "oemsync/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace oemsync {

Complex QubitInit::amp0() const {
  switch (kind) {
    case Kind::ground: return 1.0;
    case Kind::excited: return 0.0;
    case Kind::plus_x: return 1.0 / std::sqrt(2.0);
    case Kind::custom: return c0 / std::hypot(c0, c1);
  }
  return 1.0;
}

Complex QubitInit::amp1() const {
  switch (kind) {
    case Kind::ground: return 0.0;
    case Kind::excited: return 1.0;
    case Kind::plus_x: return 1.0 / std::sqrt(2.0);
    case Kind::custom: return c1 / std::hypot(c0, c1);
  }
  return 0.0;
}

MechDrive RunConfig::mech_drive() const {
  return {mech_drive_amp.value_or(params.A_lr), mech_drive_freq.value_or(params.Omega)};
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::trajectory: return "trajectory";
    case RunMode::ensemble: return "ensemble";
    case RunMode::master: return "master";
    case RunMode::qm_only: return "qm_only";
    case RunMode::validate: return "validate";
  }
  return "trajectory";
}

std::string to_string(SampleRule r) { return r == SampleRule::golden_strobe ? "golden_strobe" : "uniform"; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::string to_string(const QubitInit& q) {
  switch (q.kind) {
    case QubitInit::Kind::ground: return "ground";
    case QubitInit::Kind::excited: return "excited";
    case QubitInit::Kind::plus_x: return "plus_x";
    case QubitInit::Kind::custom: return "custom(" + format_double(q.c0) + "," + format_double(q.c1) + ")";
  }
  return "plus_x";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number(std::string_view v, int line, const std::string& key) {
  double d = 0.0;
  if (!parse_double(v, d)) throw ConfigError("cannot parse number '" + std::string(v) + "' for " + key, line);
  return d;
}

long long integer(std::string_view v, int line, const std::string& key) {
  long long n = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), n);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("cannot parse integer '" + std::string(v) + "' for " + key, line);
  }
  return n;
}

double nonneg(std::string_view v, int line, const std::string& key) {
  const double d = number(v, line, key);
  if (d < 0.0) throw ConfigError(key + " must be >= 0 (got " + std::string(v) + ")", line);
  return d;
}

double positive(std::string_view v, int line, const std::string& key) {
  const double d = number(v, line, key);
  if (!(d > 0.0)) throw ConfigError(key + " must be > 0 (got " + std::string(v) + ")", line);
  return d;
}

QubitInit parse_qubit(std::string_view v, int line) {
  QubitInit q;
  if (v == "ground") {
    q.kind = QubitInit::Kind::ground;
  } else if (v == "excited") {
    q.kind = QubitInit::Kind::excited;
  } else if (v == "plus_x") {
    q.kind = QubitInit::Kind::plus_x;
  } else if (v.starts_with("custom(") && v.ends_with(")")) {
    const auto inner = v.substr(7, v.size() - 8);
    const auto comma = inner.find(',');
    if (comma == std::string_view::npos) throw ConfigError("custom qubit state needs two amplitudes", line);
    q.kind = QubitInit::Kind::custom;
    q.c0 = number(trim(inner.substr(0, comma)), line, "qubit_state");
    q.c1 = number(trim(inner.substr(comma + 1)), line, "qubit_state");
    if (q.c0 == 0.0 && q.c1 == 0.0) throw ConfigError("custom qubit amplitudes are both zero", line);
  } else {
    throw ConfigError("unknown qubit_state '" + std::string(v) + "'", line);
  }
  return q;
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"system",
       {
           {"n_mech", [](RunConfig& c, std::string_view v, int l) {
              c.n_mech = integer(v, l, "n_mech");
              if (c.n_mech < 2) throw ConfigError("n_mech must be >= 2", l);
            }},
           {"n_cav", [](RunConfig& c, std::string_view v, int l) {
              c.n_cav = integer(v, l, "n_cav");
              if (c.n_cav < 2) throw ConfigError("n_cav must be >= 2", l);
            }},
       }},
      {"params",
       {
           {"E_J", [](RunConfig& c, std::string_view v, int l) { c.params.E_J = number(v, l, "E_J"); }},
           {"g_q", [](RunConfig& c, std::string_view v, int l) { c.params.g_q = number(v, l, "g_q"); }},
           {"omega_m", [](RunConfig& c, std::string_view v, int l) { c.params.omega_m = positive(v, l, "omega_m"); }},
           {"Delta", [](RunConfig& c, std::string_view v, int l) { c.params.Delta = number(v, l, "Delta"); }},
           {"g_o", [](RunConfig& c, std::string_view v, int l) { c.params.g_o = number(v, l, "g_o"); }},
           {"A_lp", [](RunConfig& c, std::string_view v, int l) { c.params.A_lp = nonneg(v, l, "A_lp"); }},
           {"A_lr", [](RunConfig& c, std::string_view v, int l) { c.params.A_lr = nonneg(v, l, "A_lr"); }},
           {"Omega", [](RunConfig& c, std::string_view v, int l) { c.params.Omega = number(v, l, "Omega"); }},
           {"kappa", [](RunConfig& c, std::string_view v, int l) { c.params.kappa = nonneg(v, l, "kappa"); }},
           {"gamma", [](RunConfig& c, std::string_view v, int l) { c.params.gamma = nonneg(v, l, "gamma"); }},
           {"epsilon", [](RunConfig& c, std::string_view v, int l) { c.params.epsilon = number(v, l, "epsilon"); }},
           {"mech_drive_amp",
            [](RunConfig& c, std::string_view v, int l) { c.mech_drive_amp = nonneg(v, l, "mech_drive_amp"); }},
           {"mech_drive_freq",
            [](RunConfig& c, std::string_view v, int l) { c.mech_drive_freq = number(v, l, "mech_drive_freq"); }},
       }},
      {"initial",
       {
           {"qubit_state", [](RunConfig& c, std::string_view v, int l) { c.qubit_state = parse_qubit(v, l); }},
           {"mech_fock", [](RunConfig& c, std::string_view v, int l) {
              c.mech_fock = integer(v, l, "mech_fock");
              if (c.mech_fock < 0) throw ConfigError("mech_fock must be >= 0", l);
            }},
           {"cav_fock", [](RunConfig& c, std::string_view v, int l) {
              c.cav_fock = integer(v, l, "cav_fock");
              if (c.cav_fock < 0) throw ConfigError("cav_fock must be >= 0", l);
            }},
       }},
      {"run",
       {
           {"mode", [](RunConfig& c, std::string_view v, int l) {
              static const std::map<std::string_view, RunMode> modes = {{"trajectory", RunMode::trajectory},
                                                                        {"ensemble", RunMode::ensemble},
                                                                        {"master", RunMode::master},
                                                                        {"qm_only", RunMode::qm_only},
                                                                        {"validate", RunMode::validate}};
              const auto it = modes.find(v);
              if (it == modes.end()) throw ConfigError("unknown mode '" + std::string(v) + "'", l);
              c.mode = it->second;
            }},
           {"t_max", [](RunConfig& c, std::string_view v, int l) { c.t_max = nonneg(v, l, "t_max"); }},
           {"dt_out", [](RunConfig& c, std::string_view v, int l) { c.dt_out = positive(v, l, "dt_out"); }},
           {"n_traj", [](RunConfig& c, std::string_view v, int l) {
              const auto n = integer(v, l, "n_traj");
              if (n < 1) throw ConfigError("n_traj must be >= 1", l);
              c.n_traj = static_cast<std::size_t>(n);
            }},
           {"seed", [](RunConfig& c, std::string_view v, int l) {
              std::uint64_t s = 0;
              const auto res = std::from_chars(v.data(), v.data() + v.size(), s);
              if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
                throw ConfigError("cannot parse seed '" + std::string(v) + "'", l);
              }
              c.seed = s;
            }},
           {"rel_tol", [](RunConfig& c, std::string_view v, int l) { c.rel_tol = positive(v, l, "rel_tol"); }},
           {"abs_tol", [](RunConfig& c, std::string_view v, int l) { c.abs_tol = positive(v, l, "abs_tol"); }},
           {"max_step", [](RunConfig& c, std::string_view v, int l) { c.max_step = positive(v, l, "max_step"); }},
           {"sample_rule", [](RunConfig& c, std::string_view v, int l) {
              if (v == "uniform") {
                c.sample_rule = SampleRule::uniform;
              } else if (v == "golden_strobe") {
                c.sample_rule = SampleRule::golden_strobe;
              } else {
                throw ConfigError("unknown sample_rule '" + std::string(v) + "'", l);
              }
            }},
       }},
      {"analysis",
       {
           {"branch_threshold",
            [](RunConfig& c, std::string_view v, int l) { c.branch_threshold = nonneg(v, l, "branch_threshold"); }},
           {"min_dwell", [](RunConfig& c, std::string_view v, int l) { c.min_dwell = nonneg(v, l, "min_dwell"); }},
       }},
      {"output",
       {
           {"csv_path", [](RunConfig& c, std::string_view v, int) { c.csv_path = std::string(v); }},
           {"svg_path", [](RunConfig& c, std::string_view v, int) { c.svg_path = std::string(v); }},
           {"figure", [](RunConfig& c, std::string_view v, int) { c.figure = std::string(v); }},
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text, RunConfig base) {
  struct Pending {
    std::string section, key, value;
    int line;
  };
  std::vector<Pending> entries;
  bool preset = false;

  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!setters().contains(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key == "preset") {
      if (value != "paper_fig2") throw ConfigError("unknown preset '" + value + "'", line_no);
      preset = true;
      continue;
    }
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line_no);
    const auto& keys = setters().at(section);
    if (!keys.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    entries.push_back({section, key, value, line_no});
  }

  if (preset) base.params = ModelParams::paper_fig2();
  for (const auto& e : entries) setters().at(e.section).at(e.key)(base, e.value, e.line);
  validate(base);
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void validate(const RunConfig& c) {
  if (c.n_mech < 2 || c.n_cav < 2) throw ConfigError("Fock truncations must be >= 2", 0);
  if (c.mech_fock >= c.n_mech) throw ConfigError("mech_fock must be < n_mech", 0);
  if (c.cav_fock >= c.n_cav) throw ConfigError("cav_fock must be < n_cav", 0);
  try {
    c.params.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), 0);
  }
  if (c.sample_rule == SampleRule::golden_strobe && c.params.Omega == 0.0) {
    throw ConfigError("golden_strobe sampling needs Omega != 0", 0);
  }
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  const auto d = [](double v) { return format_double(v); };
  const ModelParams& p = c.params;
  o << "[system]\n"
    << "n_mech=" << c.n_mech << "\n"
    << "n_cav=" << c.n_cav << "\n"
    << "[params]\n"
    << "E_J=" << d(p.E_J) << "\n"
    << "g_q=" << d(p.g_q) << "\n"
    << "omega_m=" << d(p.omega_m) << "\n"
    << "Delta=" << d(p.Delta) << "\n"
    << "g_o=" << d(p.g_o) << "\n"
    << "A_lp=" << d(p.A_lp) << "\n"
    << "A_lr=" << d(p.A_lr) << "\n"
    << "Omega=" << d(p.Omega) << "\n"
    << "kappa=" << d(p.kappa) << "\n"
    << "gamma=" << d(p.gamma) << "\n"
    << "epsilon=" << d(p.epsilon) << "\n";
  if (c.mech_drive_amp) o << "mech_drive_amp=" << d(*c.mech_drive_amp) << "\n";
  if (c.mech_drive_freq) o << "mech_drive_freq=" << d(*c.mech_drive_freq) << "\n";
  o << "[initial]\n"
    << "qubit_state=" << to_string(c.qubit_state) << "\n"
    << "mech_fock=" << c.mech_fock << "\n"
    << "cav_fock=" << c.cav_fock << "\n"
    << "[run]\n"
    << "mode=" << to_string(c.mode) << "\n"
    << "t_max=" << d(c.t_max) << "\n"
    << "dt_out=" << d(c.dt_out) << "\n"
    << "n_traj=" << c.n_traj << "\n"
    << "seed=" << c.seed << "\n"
    << "rel_tol=" << d(c.rel_tol) << "\n"
    << "abs_tol=" << d(c.abs_tol) << "\n";
  if (c.max_step) o << "max_step=" << d(*c.max_step) << "\n";
  o << "sample_rule=" << to_string(c.sample_rule) << "\n"
    << "[analysis]\n"
    << "branch_threshold=" << d(c.branch_threshold) << "\n"
    << "min_dwell=" << d(c.min_dwell) << "\n"
    << "[output]\n"
    << "csv_path=" << c.csv_path << "\n"
    << "svg_path=" << c.svg_path << "\n"
    << "figure=" << c.figure << "\n";
  return o.str();
}

}  // namespace oemsync
