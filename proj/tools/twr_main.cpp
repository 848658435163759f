// twr -- performance analysis of three-phase two-way relaying under
// co-channel interference.
//
// Usage:
//   twr sweep --scenario s.json --sweep spec.json --out results.csv
//   twr sweep --sweep fig3 --out results.csv          (named preset bundle)
//   twr optimize --scenario s.json --mode joint --out result.json
//   twr validate --level fast
//
// Subcommands:
//   sweep     evaluate metric columns over a one-variable grid, write CSV
//   optimize  power-split / relay-location optimization, write JSON
//   validate  run the self-validation battery, exit nonzero on failure
//
// Exit codes: 0 success, 1 internal failure or failed validation, 2 parse
// error (no output file is produced), 3 validation error in inputs,
// 4 sweep finished with non-converged (NaN) analytic cells, 5 degenerate
// location update without --on-degenerate grid.
//
// Environment: TWR_THREADS caps the Monte Carlo worker count (0 = auto);
// TWR_MUTATION enables the fault-injection paths used by `validate`.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "twr/errors.hpp"
#include "twr/mutation.hpp"
#include "twr/optimizer.hpp"
#include "twr/scenario.hpp"
#include "twr/sweep.hpp"
#include "twr/validate.hpp"

namespace {

int run_sweep_cmd(const std::string& scenario_path, const std::string& sweep_arg,
                  const std::string& out_path, bool seed_given, uint64_t seed) {
  const twr::Preset* preset = twr::find_preset(sweep_arg);
  twr::SweepSpec spec;
  if (preset != nullptr) {
    spec = twr::parse_sweep_json(preset->sweep_json);
  } else {
    std::ifstream in(sweep_arg);
    if (!in) throw twr::ParseError("cannot open sweep file: " + sweep_arg);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    spec = twr::parse_sweep_json(text);
  }
  twr::Scenario scenario;
  if (!scenario_path.empty()) {
    scenario = twr::load_scenario(scenario_path);
  } else if (preset != nullptr) {
    scenario = twr::parse_scenario_json(preset->scenario_json);
  } else {
    throw twr::ParseError("--scenario is required unless --sweep names a preset");
  }
  if (seed_given) spec.mc_seed = seed;

  // Inputs are fully parsed and validated; only now is the output created.
  std::ofstream out(out_path);
  if (!out) throw twr::ParseError("cannot open output file: " + out_path);
  const twr::SweepOutcome outcome = twr::run_sweep(scenario, spec, out);
  out.close();
  if (!outcome.all_converged) {
    std::cerr << "warning: some analytic cells did not converge (written as nan)\n";
    return 4;
  }
  return 0;
}

int run_optimize_cmd(const std::string& scenario_path, const std::string& mode,
                     const std::string& out_path, int iters, int resolution,
                     const std::string& on_degenerate) {
  const twr::Scenario s = twr::load_scenario(scenario_path);
  const bool grid_fallback = on_degenerate == "grid";
  twr::OptResult res;
  if (mode == "omega") {
    res.omega = twr::optimal_omega(s, s.d);
    res.d = s.d;
    res.objective = twr::placement_objective(s, res.omega, res.d);
    res.iterations = 0;
    res.trace = {res.objective};
  } else if (mode == "location") {
    res.omega = s.omega;
    try {
      res.d = twr::optimal_location(s, s.omega);
    } catch (const twr::DegenerateRatioError&) {
      if (!grid_fallback) throw;
      double best = std::numeric_limits<double>::infinity();
      for (int j = 1; j < 1000; ++j) {
        const double dj = j / 1000.0;
        const double val = twr::placement_objective(s, s.omega, dj);
        if (val < best) {
          best = val;
          res.d = dj;
        }
      }
    }
    res.objective = twr::placement_objective(s, res.omega, res.d);
    res.iterations = 0;
    res.trace = {res.objective};
  } else if (mode == "joint") {
    res = twr::joint_optimize(s, iters, grid_fallback);
  } else {
    res = twr::grid_search(s, resolution);
  }

  nlohmann::ordered_json out_json;
  out_json["omega_opt"] = res.omega;
  out_json["d_opt"] = res.d;
  out_json["objective"] = res.objective;
  out_json["trace"] = res.trace;
  std::ofstream out(out_path);
  if (!out) throw twr::ParseError("cannot open output file: " + out_path);
  out << out_json.dump(2) << '\n';
  return 0;
}

int run_validate_cmd(const std::string& level_name) {
  const twr::ValidateLevel level =
      level_name == "full" ? twr::ValidateLevel::full : twr::ValidateLevel::fast;
  const auto results = twr::run_validation(level, std::cout, twr::default_twr_binary());
  return twr::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  twr::active_mutation();  // reject unknown TWR_MUTATION values up front

  CLI::App app{"three-phase two-way relaying performance analysis"};
  app.require_subcommand(1);
  uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the Monte Carlo seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate metrics over a parameter grid");
  sweep_cmd->fallthrough();
  std::string scenario_path, sweep_arg, out_path;
  sweep_cmd->add_option("--scenario", scenario_path, "scenario JSON file");
  sweep_cmd->add_option("--sweep", sweep_arg, "sweep JSON file or preset name (fig2..fig8)")
      ->required();
  sweep_cmd->add_option("--out", out_path, "output CSV path")->required();

  auto* opt_cmd = app.add_subcommand("optimize", "power split / relay location optimization");
  opt_cmd->fallthrough();
  std::string opt_scenario, mode = "joint", opt_out, on_degenerate = "fail";
  int iters = 3, resolution = 200;
  opt_cmd->add_option("--scenario", opt_scenario, "scenario JSON file")->required();
  opt_cmd->add_option("--mode", mode, "omega | location | joint | grid")
      ->check(CLI::IsMember({"omega", "location", "joint", "grid"}));
  opt_cmd->add_option("--iters", iters, "joint-mode iterations (default 3)");
  opt_cmd->add_option("--resolution", resolution, "grid-mode resolution (default 200)");
  opt_cmd->add_option("--on-degenerate", on_degenerate,
                      "degenerate location update handling: fail | grid")
      ->check(CLI::IsMember({"fail", "grid"}));
  opt_cmd->add_option("--out", opt_out, "output JSON path")->required();

  auto* val_cmd = app.add_subcommand("validate", "run the self-validation battery");
  val_cmd->fallthrough();
  std::string level = "fast";
  val_cmd->add_option("--level", level, "fast | full")
      ->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits cleanly; any misuse is a parse error
  }

  try {
    if (sweep_cmd->parsed())
      return run_sweep_cmd(scenario_path, sweep_arg, out_path, seed_opt->count() > 0, seed);
    if (opt_cmd->parsed())
      return run_optimize_cmd(opt_scenario, mode, opt_out, iters, resolution, on_degenerate);
    if (val_cmd->parsed()) return run_validate_cmd(level);
  } catch (const twr::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const twr::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const twr::DegenerateRatioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
