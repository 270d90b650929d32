#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "oemsync/config.hpp"
#include "oemsync/csv_io.hpp"
#include "oemsync/runner.hpp"
#include "oemsync/svg.hpp"

using namespace oemsync;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "oemsync_runner_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ObservableSeries circle(std::size_t n, double radius) {
  ObservableSeries s;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    Sample x;
    x.q = radius * std::cos(a);
    x.p = radius * std::sin(a);
    x.sx = k < n / 2 ? 0.5 : -0.5;
    x.sy = std::sin(a);
    x.sz = std::cos(a);
    s.push(static_cast<double>(k), x);
  }
  return s;
}

std::string decay_config(const fs::path& csv, const std::string& mode) {
  return "[system]\nn_mech=2\nn_cav=4\n[params]\nE_J=0\ng_q=0\ng_o=0\nA_lp=0\nA_lr=0\nDelta=0\nkappa=1.4\ngamma=0\n"
         "[initial]\nqubit_state=ground\ncav_fock=1\n[run]\nmode=" +
         mode + "\nt_max=3.5714285714285716\ndt_out=0.05\n[output]\ncsv_path=" + csv.string() + "\n";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OEMSYNC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("figure kinds parse and print") {
  for (const char* k : {"timeseries_sx", "timeseries_q", "bloch_projection", "phase_portrait", "phase_vs_phase",
                        "ensemble_decay"})
    CHECK(to_string(parse_figure_kind(k)) == k);
  CHECK_THROWS_AS(parse_figure_kind("pie_chart"), std::invalid_argument);
}

TEST_CASE("phase_vs_phase on identical series puts points on the diagonal") {
  FigureInput in;
  in.obs = circle(50, 1.0);
  PhaseRecord ph = phase_record(in.obs, 1.0);
  ph.psi = ph.phi;
  in.phases = ph;
  const Figure fig = build_figure(FigureKind::phase_vs_phase, in);
  REQUIRE(fig.panels.size() == 4);
  const auto& s = fig.panels[0].series.at(0);
  REQUIRE(s.x.size() > 10);
  for (std::size_t k = 0; k < s.x.size(); ++k) CHECK(s.x[k] == s.y[k]);
}

TEST_CASE("phase_portrait on an exact circle is a closed ring") {
  FigureInput in;
  in.obs = circle(64, 2.0);
  const Figure fig = build_figure(FigureKind::phase_portrait, in);
  REQUIRE(fig.panels.size() == 1);
  const auto& s = fig.panels[0].series.at(0);
  REQUIRE(s.x.size() == 64);
  for (std::size_t k = 0; k < s.x.size(); ++k) CHECK(std::hypot(s.x[k], s.y[k]) == doctest::Approx(2.0));
  const auto& p = fig.panels[0];
  CHECK(p.x_max - p.x_min == doctest::Approx(p.y_max - p.y_min));
  const std::string svg = to_svg(fig);
  std::size_t circles = 0;
  for (auto pos = svg.find("<circle"); pos != std::string::npos; pos = svg.find("<circle", pos + 1)) ++circles;
  CHECK(circles == 64);
}

TEST_CASE("figures are byte-deterministic and colored by branch") {
  FigureInput in;
  in.obs = circle(80, 1.5);
  in.labels = classify_branches(in.obs.times, in.obs.sx, {0.1, 5.0}).labels;
  for (FigureKind k : {FigureKind::timeseries_sx, FigureKind::timeseries_q, FigureKind::bloch_projection,
                       FigureKind::phase_portrait, FigureKind::phase_vs_phase, FigureKind::ensemble_decay}) {
    FigureInput copy = in;
    if (k == FigureKind::phase_vs_phase) copy.phases = phase_record(in.obs, 1.0);
    const std::string a = to_svg(build_figure(k, copy));
    const std::string b = to_svg(build_figure(k, copy));
    CHECK(a == b);
    CHECK(a.starts_with("<svg"));
    CHECK(a.find("nan") == std::string::npos);
  }
  const std::string svg = to_svg(build_figure(FigureKind::timeseries_sx, in));
  CHECK(svg.find("#1f4fd8") != std::string::npos);
  CHECK(svg.find("#d62728") != std::string::npos);

  const auto p1 = scratch() / "a.svg", p2 = scratch() / "b.svg";
  emit_figure(FigureKind::bloch_projection, in, p1.string());
  emit_figure(FigureKind::bloch_projection, in, p2.string());
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("figures reject missing series") {
  FigureInput empty;
  CHECK_THROWS_AS(build_figure(FigureKind::timeseries_sx, empty), std::invalid_argument);
  FigureInput no_phases;
  no_phases.obs = circle(20, 1.0);
  CHECK_THROWS_AS(build_figure(FigureKind::phase_vs_phase, no_phases), std::invalid_argument);
  FigureInput bad_labels;
  bad_labels.obs = circle(20, 1.0);
  bad_labels.labels = {Branch::blue};
  CHECK_THROWS_AS(build_figure(FigureKind::timeseries_sx, bad_labels), std::invalid_argument);
  CHECK_THROWS(emit_figure(FigureKind::phase_portrait, no_phases, "/nonexistent-dir/x.svg"));
}

TEST_CASE("ensemble_decay draws the standard-error band") {
  FigureInput in;
  in.obs = circle(30, 1.0);
  in.std_error = in.obs;
  const Figure fig = build_figure(FigureKind::ensemble_decay, in);
  REQUIRE(fig.panels[0].series.size() == 2);
  CHECK(fig.panels[0].series[0].style == PlotSeries::Style::band);
  CHECK(to_svg(fig).find("<polygon") != std::string::npos);
}

TEST_CASE("run: master mode on the cavity-decay config") {
  const auto csv = scratch() / "master.csv";
  const RunConfig cfg = parse_config(decay_config(csv, "master"));
  const RunOutcome out = run(cfg);
  CHECK(out.exit_code == 0);
  CHECK(out.summary.starts_with("master:"));
  const CsvDocument doc = read_csv(csv.string());
  REQUIRE(doc.rows.size() == 72);
  for (const auto& r : doc.rows) CHECK(std::abs(r.s.n_cav - std::exp(-1.4 * r.t)) < 1e-6);
  // the header alone reproduces the run
  const RunConfig again = parse_config(config_text_from_header(doc));
  CHECK(to_text(again) == to_text(cfg));
  const RunOutcome out2 = run(again);
  CHECK(slurp(csv) == slurp(csv));  // rewritten identically below
  CHECK(out2.summary == out.summary);
}

TEST_CASE("run: trajectory with t_max = 0 writes the initial sample only") {
  const auto csv = scratch() / "t0.csv";
  RunConfig cfg = parse_config("[system]\nn_mech=3\nn_cav=2\n[run]\nt_max=0\n[output]\ncsv_path=" + csv.string());
  const RunOutcome out = run(cfg);
  CHECK(out.exit_code == 0);
  const CsvDocument doc = read_csv(csv.string());
  REQUIRE(doc.rows.size() == 1);
  CHECK(doc.rows[0].t == 0.0);
  CHECK(doc.rows[0].s.sx == doctest::Approx(1.0));  // plus_x initial state
  CHECK(doc.appended_columns.empty());
}

TEST_CASE("run: trajectories are reproducible from the csv header") {
  const auto csv = scratch() / "traj.csv";
  const auto svg = scratch() / "traj.svg";
  RunConfig cfg = parse_config("preset=paper_fig2\n[system]\nn_mech=4\nn_cav=3\n[run]\nt_max=20\ndt_out=0.5\nseed=5\n"
                               "sample_rule=golden_strobe\n[output]\ncsv_path=" +
                               csv.string() + "\nsvg_path=" + svg.string() + "\nfigure=phase_vs_phase\n");
  const RunOutcome a = run(cfg);
  const std::string first = slurp(csv);
  CHECK(fs::exists(svg));
  const RunConfig back = parse_config(config_text_from_header(read_csv(csv.string())));
  const RunOutcome b = run(back);
  CHECK(slurp(csv) == first);
  CHECK(a.summary == b.summary);
  CHECK(a.summary.find("dwells") != std::string::npos);
}

TEST_CASE("run: ensemble mode appends mean and stderr columns") {
  const auto csv = scratch() / "ens.csv";
  const auto svg = scratch() / "ens.svg";
  RunConfig cfg = parse_config("[system]\nn_mech=3\nn_cav=2\n[run]\nmode=ensemble\nt_max=4\ndt_out=1\nn_traj=6\n"
                               "[output]\ncsv_path=" + csv.string() + "\nsvg_path=" + svg.string() + "\n");
  const RunOutcome out = run(cfg);
  CHECK(out.summary.starts_with("ensemble: n_traj=6"));
  const CsvDocument doc = read_csv(csv.string());
  CHECK(doc.appended_columns.size() == 18);
  REQUIRE(doc.rows.size() == 5);
  for (const auto& r : doc.rows) CHECK(r.appended[0] == r.s.sx);  // sx_mean
  CHECK(slurp(svg).find("<polygon") != std::string::npos);
}

TEST_CASE("run: reduced model and validation modes") {
  const auto csv = scratch() / "qm.csv";
  RunConfig cfg = parse_config("[system]\nn_mech=4\nn_cav=2\n[run]\nmode=qm_only\nt_max=10\ndt_out=0.5\n"
                               "[output]\ncsv_path=" + csv.string() + "\n");
  const RunOutcome qm = run(cfg);
  CHECK(qm.summary.starts_with("qm_only:"));
  CHECK(qm.summary.find("sync(phi',drive)") != std::string::npos);
  CHECK(read_csv(csv.string()).rows.size() == 21);

  cfg = parse_config("[system]\nn_mech=3\nn_cav=2\n[run]\nmode=validate\nt_max=5\ndt_out=1\nn_traj=4\n"
                     "[output]\ncsv_path=" + csv.string() + "\n");
  const ValidationReport rep = run_validation(cfg);
  CHECK(rep.doubled.n_mech == 6);
  CHECK(rep.doubled.n_cav == 4);
  const RunOutcome val = run(cfg);
  CHECK(val.exit_code == (rep.passed() ? 0 : 1));
  CHECK(val.summary.find(rep.passed() ? "PASS" : "FAIL") != std::string::npos);
}

TEST_CASE("run: invalid configs are rejected before any work") {
  RunConfig cfg;
  cfg.mech_fock = 99;
  CHECK_THROWS_AS(run(cfg), ConfigError);
}

TEST_CASE("command-line tool exit codes") {
  const auto dir = scratch();
  const auto cfg_path = dir / "cli.cfg";
  {
    std::ofstream(cfg_path) << decay_config(dir / "cli.csv", "master");
  }
  CHECK(run_cli("run --config " + cfg_path.string()) == 0);
  CHECK(fs::exists(dir / "cli.csv"));
  CHECK(run_cli("run --config " + cfg_path.string() + " --mode trajectory --seed 4 --out-csv " +
                (dir / "cli2.csv").string() + " --out-svg " + (dir / "cli2.svg").string()) == 0);
  const CsvDocument doc = read_csv((dir / "cli2.csv").string());
  const RunConfig back = parse_config(config_text_from_header(doc));
  CHECK(back.mode == RunMode::trajectory);
  CHECK(back.seed == 4);
  CHECK(fs::exists(dir / "cli2.svg"));

  const auto bad = dir / "bad.cfg";
  {
    std::ofstream(bad) << "[params]\nkappa=-1\n";
  }
  CHECK(run_cli("run --config " + bad.string()) == 2);
  CHECK(run_cli("run --config " + (dir / "missing.cfg").string()) == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --config " + cfg_path.string() + " --out-csv /nonexistent-dir/x.csv") == 3);

  const auto val = dir / "val.cfg";
  {
    std::ofstream(val) << "[system]\nn_mech=3\nn_cav=2\n[run]\nt_max=3\ndt_out=1\nn_traj=3\n[output]\ncsv_path=" +
                              (dir / "val.csv").string() + "\n";
  }
  const int rc = run_cli("validate --config " + val.string());
  CHECK((rc == 0 || rc == 1));
  CHECK(read_csv((dir / "val.csv").string()).header_lines.size() > 5);
}
