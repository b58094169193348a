#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "caslif/errors.hpp"
#include "commands.hpp"
#include "config.hpp"

// exit codes: 0 success, 2 config error, 3 numerical failure,
// 4 data/analysis error
namespace {

int run_guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const cli::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const caslif::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const caslif::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Lifshitz forces in fluids: computation and "
               "force-curve analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  cli::GlobalOptions g;
  std::string out_dir = ".";
  app.add_option("--config", g.config, "JSON job configuration")
      ->configurable(false);
  app.add_option("--out", out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--threads", g.threads,
                 "worker threads (0 = hardware concurrency)");

  cli::EpsOptions eps;
  auto* cmd_eps = app.add_subcommand(
      "eps", "tabulate a material permittivity at imaginary frequencies");
  cmd_eps->add_option("--material", eps.material, "material JSON file")
      ->required();
  cmd_eps->add_option("--temperature", eps.temperature_k,
                      "temperature in K for the Matsubara grid");
  cmd_eps->add_option("--m-max", eps.m_max, "highest Matsubara index");
  cmd_eps->add_option("--xi-min", eps.xi_min, "geometric grid start (rad/s)");
  cmd_eps->add_option("--xi-max", eps.xi_max, "geometric grid end (rad/s)");
  cmd_eps->add_option("--points", eps.points, "geometric grid size");
  cmd_eps->add_option("--out-file", eps.out_file, "output table name");

  auto* cmd_force = app.add_subcommand(
      "force", "compute sphere-plate force curves (config-driven)");
  auto* cmd_sim = app.add_subcommand(
      "simulate", "generate synthetic deflection traces (config-driven)");
  auto* cmd_cal = app.add_subcommand(
      "calibrate", "hydrodynamic calibration from trace files (config-driven)");
  auto* cmd_ext = app.add_subcommand(
      "extract", "static force extraction and ensemble statistics "
                 "(config-driven)");

  cli::ConductivityOptions cond;
  auto* cmd_cond = app.add_subcommand(
      "conductivity-fit", "log-log linear fit of a conductivity series");
  cmd_cond->add_option("--input", cond.input, "two-column series file")
      ->required();
  cmd_cond->add_option("--out-file", cond.out_file, "report file name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g.out_dir = out_dir;
  g.seed_set = seed_opt->count() > 0;

  auto need_config = [&](const char* cmd) {
    if (g.config.empty()) {
      std::cerr << "config error: '" << cmd << "' needs --config <file>\n";
      return false;
    }
    return true;
  };

  if (cmd_eps->parsed()) {
    return run_guarded([&] { return cli::cmd_eps(g, eps); });
  }
  if (cmd_force->parsed()) {
    if (!need_config("force")) return 2;
    return run_guarded([&] { return cli::cmd_force(g); });
  }
  if (cmd_sim->parsed()) {
    if (!need_config("simulate")) return 2;
    return run_guarded([&] { return cli::cmd_simulate(g); });
  }
  if (cmd_cal->parsed()) {
    if (!need_config("calibrate")) return 2;
    return run_guarded([&] { return cli::cmd_calibrate(g); });
  }
  if (cmd_ext->parsed()) {
    if (!need_config("extract")) return 2;
    return run_guarded([&] { return cli::cmd_extract(g); });
  }
  if (cmd_cond->parsed()) {
    return run_guarded([&] { return cli::cmd_conductivity_fit(g, cond); });
  }
  return 2;
}
