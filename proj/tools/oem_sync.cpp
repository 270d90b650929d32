// oem-sync: command-line front end.
//
//   oem-sync run --config <path> [--preset paper_fig2] [--mode m] [--seed N]
//                [--out-csv path] [--out-svg path]
//   oem-sync validate --config <path> [--out-csv path]
//
// Exit status: 0 success, 1 validation verdict failed, 2 bad config or
// arguments, 3 solver or I/O failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "oemsync/config.hpp"
#include "oemsync/errors.hpp"
#include "oemsync/runner.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::string preset;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::string out_csv;
  std::string out_svg;
};

oemsync::RunConfig resolve(const Overrides& o, std::optional<oemsync::RunMode> forced_mode) {
  oemsync::RunConfig base;
  if (!o.preset.empty()) {
    if (o.preset != "paper_fig2") throw oemsync::ConfigError("unknown preset '" + o.preset + "'", 0);
    base.params = oemsync::ModelParams::paper_fig2();
  }
  oemsync::RunConfig cfg = oemsync::load_config(o.config_path, base);
  std::string overlay;
  if (!o.mode.empty()) overlay += "[run]\nmode=" + o.mode + "\n";
  if (forced_mode) overlay += "[run]\nmode=" + oemsync::to_string(*forced_mode) + "\n";
  if (o.seed) overlay += "[run]\nseed=" + std::to_string(*o.seed) + "\n";
  if (!o.out_csv.empty()) overlay += "[output]\ncsv_path=" + o.out_csv + "\n";
  if (!o.out_svg.empty()) overlay += "[output]\nsvg_path=" + o.out_svg + "\n";
  if (!overlay.empty()) {
    try {
      cfg = oemsync::parse_config(overlay, cfg);
    } catch (const oemsync::ConfigError& e) {
      // overlay line numbers are meaningless to the user
      const std::string what = e.what();
      const auto colon = what.find(": ");
      throw oemsync::ConfigError("command line: " + (colon == std::string::npos ? what : what.substr(colon + 2)), 0);
    }
  }
  return cfg;
}

int execute(const Overrides& o, std::optional<oemsync::RunMode> forced_mode) {
  oemsync::RunConfig cfg;
  try {
    cfg = resolve(o, forced_mode);
  } catch (const oemsync::ConfigError& e) {
    std::cerr << "oem-sync: config error: " << e.what() << "\n";
    return 2;
  }
  try {
    const oemsync::RunOutcome out = oemsync::run(cfg);
    std::cout << out.summary << "\n";
    for (const auto& a : out.artifacts) std::cerr << "wrote " << a << "\n";
    return out.exit_code;
  } catch (const oemsync::ConfigError& e) {
    std::cerr << "oem-sync: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "oem-sync: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit-optomechanical synchronization simulator"};
  app.require_subcommand(1);

  Overrides run_args;
  auto* run = app.add_subcommand("run", "Run the mode selected by the config");
  run->add_option("--config", run_args.config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--preset", run_args.preset, "Parameter preset applied before the config")
      ->check(CLI::IsMember({"paper_fig2"}));
  run->add_option("--mode", run_args.mode, "Override [run] mode")
      ->check(CLI::IsMember({"trajectory", "ensemble", "master", "qm_only", "validate"}));
  run->add_option("--seed", run_args.seed, "Override [run] seed");
  run->add_option("--out-csv", run_args.out_csv, "Override [output] csv_path");
  run->add_option("--out-svg", run_args.out_svg, "Override [output] svg_path");

  Overrides val_args;
  auto* val = app.add_subcommand("validate", "Truncation convergence check");
  val->add_option("--config", val_args.config_path, "Config file")->required()->check(CLI::ExistingFile);
  val->add_option("--out-csv", val_args.out_csv, "Override [output] csv_path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*run) return execute(run_args, std::nullopt);
  return execute(val_args, oemsync::RunMode::validate);
}
