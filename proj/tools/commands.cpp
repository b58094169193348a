#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"
#include "caslif/fluid_forces.hpp"
#include "caslif/io.hpp"
#include "caslif/parallel.hpp"
#include "caslif/pipeline.hpp"
#include "config.hpp"

namespace cli {

using nlohmann::json;

namespace {

std::filesystem::path resolve_out(const GlobalOptions& g, const std::string& name) {
  std::filesystem::path p(name);
  return p.is_absolute() ? p : g.out_dir / p;
}

std::filesystem::path resolve_in(const std::filesystem::path& base,
                                 const std::string& name) {
  std::filesystem::path p(name);
  return p.is_absolute() ? p : base / p;
}

// workflow artifacts (manifests, calibration reports, traces) usually live in
// the --out directory; fall back to the config's directory for shipped data
std::filesystem::path resolve_workflow_in(const GlobalOptions& g,
                                          const std::filesystem::path& base,
                                          const std::string& name) {
  std::filesystem::path p(name);
  if (p.is_absolute()) return p;
  if (std::filesystem::exists(g.out_dir / p)) return g.out_dir / p;
  return base / p;
}

std::string fmt(double v, const char* format = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// align -> compensate -> resample; shared by calibrate and extract
caslif::SampledSignal prepare_trace(const std::filesystem::path& file,
                                    double step_nm) {
  const caslif::DeflectionTrace raw = caslif::read_trace_csv(file);
  const caslif::AlignedTrace aligned = caslif::align_contact_zero(raw);
  return caslif::resample_uniform(caslif::compensate_bending(aligned), step_nm);
}

// manifest access: maps a requested velocity to the per-run trace files
struct TraceSet {
  std::vector<std::filesystem::path> files;  // one per run
};

TraceSet traces_for_velocity(const json& manifest,
                             const std::filesystem::path& base,
                             double velocity_nm_s) {
  TraceSet set;
  if (!manifest.count("runs")) {
    throw config_error("manifest: missing 'runs' array");
  }
  for (const auto& run : manifest.at("runs")) {
    bool found = false;
    for (const auto& tr : run.at("traces")) {
      if (std::fabs(tr.at("velocity_nm_s").get<double>() - velocity_nm_s) <
          1e-6 * std::fabs(velocity_nm_s)) {
        set.files.push_back(resolve_in(base, tr.at("file").get<std::string>()));
        found = true;
        break;
      }
    }
    if (!found) {
      std::ostringstream msg;
      msg << "manifest: no trace at velocity " << velocity_nm_s << " nm/s for run "
          << run.at("run").get<int>();
      throw config_error(msg.str());
    }
  }
  return set;
}

// average per-run combined signals on their common grid
caslif::SampledSignal average_signals(const std::vector<caslif::SampledSignal>& sigs) {
  double lo = -1e300, hi = 1e300;
  for (const auto& s : sigs) {
    lo = std::max(lo, s.x0_nm);
    hi = std::min(hi, s.x_last());
  }
  if (hi < lo) throw caslif::analysis_error("combined runs share no grid overlap");
  caslif::SampledSignal out = caslif::slice_signal(sigs.front(), lo, hi);
  for (std::size_t r = 1; r < sigs.size(); ++r) {
    const auto s = caslif::slice_signal(sigs[r], lo, hi);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += s.values[i];
  }
  for (double& v : out.values) v /= static_cast<double>(sigs.size());
  return out;
}

}  // namespace

int cmd_eps(const GlobalOptions& g, const EpsOptions& opt) {
  const caslif::DielectricModel model = [&] {
    try {
      return caslif::read_material_file(opt.material);
    } catch (const caslif::error& e) {
      throw config_error(e.what());
    }
  }();

  std::vector<double> xi, eps;
  if (opt.xi_min > 0.0 && opt.xi_max > opt.xi_min) {
    for (int i = 0; i < opt.points; ++i) {
      xi.push_back(opt.xi_min *
                   std::pow(opt.xi_max / opt.xi_min,
                            static_cast<double>(i) / (opt.points - 1)));
    }
  } else {
    const auto grid = caslif::matsubara_grid(opt.temperature_k, opt.m_max);
    const bool include_zero = !model.metallic_at_zero();
    for (std::size_t m = include_zero ? 0 : 1; m < grid.xi_rad_s.size(); ++m) {
      xi.push_back(grid.xi_rad_s[m]);
    }
  }
  eps.resize(xi.size());
  caslif::parallel_for(xi.size(), g.threads, [&](std::size_t i) {
    eps[i] = xi[i] == 0.0 ? *model.static_value() : model.eval(xi[i]);
  });

  caslif::write_table(resolve_out(g, opt.out_file),
                      {{"material", model.describe()},
                       {"temperature_K", fmt(opt.temperature_k)}},
                      {"xi_rad_s", "eps"}, {xi, eps});
  std::cout << "wrote " << resolve_out(g, opt.out_file).string() << " ("
            << xi.size() << " rows)\n";
  return 0;
}

int cmd_force(const GlobalOptions& g) {
  const json cfg = load_config(g.config);
  require_keys(cfg,
               {"system", "distances", "m_max", "salt", "roughness", "output"},
               {"system", "distances"}, "force config");
  const auto base = g.config.parent_path();
  const caslif::LayerSystem sys = system_from_json(cfg.at("system"), base);

  const json& dist = cfg.at("distances");
  require_keys(dist, {"min_nm", "max_nm", "points"}, {"min_nm", "max_nm"},
               "force config.distances");
  const auto grid = caslif::geometric_grid(
      get_number(dist, "min_nm") * 1e-9, get_number(dist, "max_nm") * 1e-9,
      static_cast<int>(get_number_or(dist, "points", 81)));

  caslif::MatsubaraOptions mopts;
  mopts.m_max = static_cast<int>(get_number_or(cfg, "m_max", 0));

  bool with_salt = false;
  caslif::SaltScreening salt{0.0};
  if (cfg.count("salt")) {
    const json& s = cfg.at("salt");
    require_keys(s,
                 {"debye_length_nm", "concentration_mol_m3", "charge_number",
                  "static_dielectric"},
                 {}, "force config.salt");
    if (s.count("debye_length_nm")) {
      salt.inverse_debye_m = 1.0 / (get_number(s, "debye_length_nm") * 1e-9);
    } else if (s.count("concentration_mol_m3")) {
      const auto medium_eps = sys.medium.static_value();
      const double eps_static =
          get_number_or(s, "static_dielectric",
                        medium_eps.has_value() ? *medium_eps : 0.0);
      if (!(eps_static > 0.0)) {
        throw config_error("force config.salt: needs static_dielectric");
      }
      const double lam = caslif::debye_length(
          {get_number(s, "concentration_mol_m3"),
           get_number_or(s, "charge_number", 1.0)},
          {1.0, eps_static, sys.temperature_k});
      salt.inverse_debye_m = std::isinf(lam) ? 0.0 : 1.0 / lam;
    } else {
      throw config_error(
          "force config.salt: needs debye_length_nm or concentration_mol_m3");
    }
    with_salt = true;
  }

  bool with_rough = false;
  caslif::RoughnessDistribution rough_sphere, rough_plate;
  if (cfg.count("roughness")) {
    const json& r = cfg.at("roughness");
    require_keys(r, {"sphere_file", "plate_file"}, {"sphere_file", "plate_file"},
                 "force config.roughness");
    try {
      rough_sphere = caslif::read_roughness_histogram(
          resolve_in(base, r.at("sphere_file").get<std::string>()));
      rough_plate = caslif::read_roughness_histogram(
          resolve_in(base, r.at("plate_file").get<std::string>()));
    } catch (const caslif::error& e) {
      throw config_error(e.what());
    }
    with_rough = true;
  }

  std::vector<std::string> columns = {"d_nm", "F_pN"};
  std::vector<std::vector<double>> data(2, std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) data[0][i] = grid[i] * 1e9;

  caslif::parallel_for(grid.size(), g.threads, [&](std::size_t i) {
    data[1][i] = caslif::force_sphere_plate(sys, grid[i], mopts) * 1e12;
  });
  if (with_salt) {
    columns.push_back("F_salt_pN");
    data.emplace_back(grid.size());
    caslif::parallel_for(grid.size(), g.threads, [&](std::size_t i) {
      data.back()[i] = caslif::force_with_salt(sys, grid[i], salt, mopts) * 1e12;
    });
  }
  if (with_rough) {
    columns.push_back("F_rough_pN");
    data.emplace_back(grid.size());
    auto base_force = [&](double d) {
      return caslif::force_sphere_plate(sys, d, mopts);
    };
    caslif::parallel_for(grid.size(), g.threads, [&](std::size_t i) {
      data.back()[i] =
          caslif::roughness_correct(base_force, rough_sphere, rough_plate,
                                    grid[i]) *
          1e12;
    });
  }

  std::vector<std::pair<std::string, std::string>> meta = {
      {"sphere", sys.sphere.describe()},
      {"plate", sys.plate.describe()},
      {"medium", sys.medium.describe()},
      {"temperature_K", fmt(sys.temperature_k)},
      {"radius_um", fmt(sys.sphere_radius_m * 1e6)},
      {"sign_convention", "negative = attractive"}};
  if (with_salt) {
    meta.emplace_back("inverse_debye_per_m", fmt(salt.inverse_debye_m));
  }
  const std::string out_name =
      cfg.count("output") ? cfg.at("output").get<std::string>() : "force_curve.txt";
  caslif::write_table(resolve_out(g, out_name), meta, columns, data);
  std::cout << "wrote " << resolve_out(g, out_name).string() << " ("
            << grid.size() << " distances)\n";
  return 0;
}

int cmd_simulate(const GlobalOptions& g) {
  const json cfg = load_config(g.config);
  require_keys(cfg,
               {"runs", "velocities_nm_s", "drift", "seed", "trace",
                "static_force", "output_prefix"},
               {"runs", "velocities_nm_s", "trace"}, "simulate config");
  const auto base = g.config.parent_path();

  const int n_runs = static_cast<int>(get_number(cfg, "runs"));
  std::vector<double> velocities;
  for (const auto& v : cfg.at("velocities_nm_s")) velocities.push_back(v.get<double>());
  if (velocities.empty()) throw config_error("simulate: needs at least one velocity");

  double drift_mean = 0.0, drift_sigma = 0.0;
  bool drift_per_trace = false;
  if (cfg.count("drift")) {
    require_keys(cfg.at("drift"), {"mean_nm", "sigma_nm", "mode"}, {},
                 "simulate.drift");
    drift_mean = get_number_or(cfg.at("drift"), "mean_nm", 0.0);
    drift_sigma = get_number_or(cfg.at("drift"), "sigma_nm", 0.0);
    if (cfg.at("drift").count("mode")) {
      const std::string mode = cfg.at("drift").at("mode").get<std::string>();
      if (mode == "per_trace") {
        drift_per_trace = true;  // block acquisition: drift moves between traces
      } else if (mode != "shared") {
        throw config_error("simulate.drift.mode: expected 'shared' or 'per_trace'");
      }
    }
  }

  const json& tr = cfg.at("trace");
  require_keys(tr,
               {"range_min_nm", "range_max_nm", "sample_spacing_nm",
                "force_constant_nn_per_v", "spring_constant_n_per_m",
                "contact_offset_nm", "background_slope_pn_per_nm",
                "background_offset_pn", "noise_sigma_pn", "viscosity_pa_s",
                "radius_um"},
               {}, "simulate.trace");
  caslif::SynthParams params;
  params.range_min_nm = get_number_or(tr, "range_min_nm", params.range_min_nm);
  params.range_max_nm = get_number_or(tr, "range_max_nm", params.range_max_nm);
  params.sample_spacing_nm =
      get_number_or(tr, "sample_spacing_nm", params.sample_spacing_nm);
  params.force_constant_nn_per_v =
      get_number_or(tr, "force_constant_nn_per_v", params.force_constant_nn_per_v);
  params.spring_constant_n_per_m =
      get_number_or(tr, "spring_constant_n_per_m", params.spring_constant_n_per_m);
  params.contact_offset_nm =
      get_number_or(tr, "contact_offset_nm", params.contact_offset_nm);
  params.background_slope_pn_per_nm = get_number_or(
      tr, "background_slope_pn_per_nm", params.background_slope_pn_per_nm);
  params.background_offset_pn =
      get_number_or(tr, "background_offset_pn", params.background_offset_pn);
  params.noise_sigma_pn = get_number_or(tr, "noise_sigma_pn", params.noise_sigma_pn);
  params.viscosity_pa_s = get_number_or(tr, "viscosity_pa_s", params.viscosity_pa_s);
  params.radius_m = get_number_or(tr, "radius_um", params.radius_m * 1e6) * 1e-6;
  params.seed = g.seed_set ? g.seed
                           : static_cast<std::uint64_t>(get_number_or(cfg, "seed", 1));
  if (cfg.count("static_force")) {
    params.static_force = static_force_from_json(cfg.at("static_force"), base,
                                                 params.radius_m, g.threads);
  }

  const std::string prefix = cfg.count("output_prefix")
                                 ? cfg.at("output_prefix").get<std::string>()
                                 : "sim";

  json manifest;
  manifest["velocities_nm_s"] = velocities;
  manifest["runs"] = json::array();
  json truth_doc;
  truth_doc["force_constant_nn_per_v"] = params.force_constant_nn_per_v;
  truth_doc["spring_constant_n_per_m"] = params.spring_constant_n_per_m;
  truth_doc["contact_offset_nm"] = params.contact_offset_nm;
  truth_doc["background_slope_pn_per_nm"] = params.background_slope_pn_per_nm;
  truth_doc["background_offset_pn"] = params.background_offset_pn;
  truth_doc["noise_sigma_pn"] = params.noise_sigma_pn;
  truth_doc["viscosity_pa_s"] = params.viscosity_pa_s;
  truth_doc["radius_um"] = params.radius_m * 1e6;
  truth_doc["seed"] = params.seed;
  truth_doc["static_force"] = params.static_force.describe();
  truth_doc["runs"] = json::array();

  struct RunOutput {
    json manifest_entry;
    json truth_entry;
    std::vector<std::pair<std::filesystem::path, caslif::DeflectionTrace>> files;
  };
  std::vector<RunOutput> outputs(static_cast<std::size_t>(n_runs));

  caslif::parallel_for(static_cast<std::size_t>(n_runs), g.threads,
                       [&](std::size_t r) {
    // the drift offset is either shared by the run's velocity set
    // (alternating acquisition) or redrawn per trace (block acquisition)
    std::mt19937_64 drift_rng(
        caslif::derive_seed(params.seed, static_cast<std::uint64_t>(r) * 2 + 1));
    auto draw_drift = [&] {
      double drift = drift_mean;
      if (drift_sigma > 0.0) {
        const double u1 =
            (static_cast<double>(drift_rng() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(drift_rng() >> 11) * 0x1.0p-53;
        drift += drift_sigma * std::sqrt(-2.0 * std::log(u1)) *
                 std::cos(2.0 * M_PI * u2);
      }
      return drift;
    };
    double drift = draw_drift();
    RunOutput& out = outputs[r];
    out.manifest_entry["run"] = static_cast<int>(r);
    out.manifest_entry["traces"] = json::array();
    out.truth_entry["run"] = static_cast<int>(r);
    out.truth_entry["drift_nm"] = drift;
    out.truth_entry["traces"] = json::array();
    for (std::size_t vi = 0; vi < velocities.size(); ++vi) {
      if (drift_per_trace && vi > 0) drift = draw_drift();
      caslif::SynthParams p = params;
      p.velocity_nm_s = velocities[vi];
      p.drift_offset_nm = drift;
      p.seed = caslif::derive_seed(params.seed,
                                   static_cast<std::uint64_t>(r) * 64 + vi * 2);
      char name[128];
      std::snprintf(name, sizeof name, "%s_run%03zu_v%zu.csv", prefix.c_str(), r, vi);
      p.label = std::filesystem::path(name).stem().string();
      caslif::SynthTruth truth;
      caslif::DeflectionTrace trace = caslif::synth_trace(p, &truth);
      json m_entry;
      m_entry["velocity_nm_s"] = velocities[vi];
      m_entry["file"] = name;
      out.manifest_entry["traces"].push_back(m_entry);
      json t_entry;
      t_entry["velocity_nm_s"] = velocities[vi];
      t_entry["file"] = name;
      t_entry["seed"] = p.seed;
      t_entry["drift_nm"] = drift;
      t_entry["snapped"] = truth.snapped;
      if (truth.snapped) t_entry["snap_piezo_nm"] = truth.snap_piezo_nm;
      out.truth_entry["traces"].push_back(t_entry);
      out.files.emplace_back(resolve_out(g, name), std::move(trace));
    }
  });

  std::size_t files = 0;
  for (auto& out : outputs) {
    manifest["runs"].push_back(out.manifest_entry);
    truth_doc["runs"].push_back(out.truth_entry);
    for (const auto& [path, trace] : out.files) {
      caslif::write_trace_csv(path, trace);
      ++files;
    }
  }
  caslif::atomic_write_text(resolve_out(g, prefix + "_manifest.json"),
                            manifest.dump(2) + "\n");
  caslif::atomic_write_text(resolve_out(g, prefix + "_truth.json"),
                            truth_doc.dump(2) + "\n");
  std::cout << "wrote " << files << " trace files, "
            << (prefix + "_manifest.json") << ", " << (prefix + "_truth.json")
            << " under " << g.out_dir.string() << "\n";
  return 0;
}

namespace {

struct CalibrationInputs {
  std::vector<std::filesystem::path> v1_files, v2_files;
  double v1 = 0.0, v2 = 0.0;
};

CalibrationInputs calibration_inputs(const GlobalOptions& g, const json& cfg,
                                     const std::filesystem::path& base) {
  CalibrationInputs in;
  in.v1 = get_number(cfg, "v1_nm_s");
  in.v2 = get_number(cfg, "v2_nm_s");
  if (cfg.count("manifest")) {
    const auto mpath =
        resolve_workflow_in(g, base, cfg.at("manifest").get<std::string>());
    const json manifest = load_config(mpath);
    in.v1_files = traces_for_velocity(manifest, mpath.parent_path(), in.v1).files;
    in.v2_files = traces_for_velocity(manifest, mpath.parent_path(), in.v2).files;
  } else {
    if (!cfg.count("traces_v1") || !cfg.count("traces_v2")) {
      throw config_error("calibrate/extract: needs 'manifest' or trace lists");
    }
    for (const auto& f : cfg.at("traces_v1")) {
      in.v1_files.push_back(resolve_workflow_in(g, base, f.get<std::string>()));
    }
    for (const auto& f : cfg.at("traces_v2")) {
      in.v2_files.push_back(resolve_workflow_in(g, base, f.get<std::string>()));
    }
  }
  if (in.v1_files.size() != in.v2_files.size() || in.v1_files.empty()) {
    throw config_error("calibrate/extract: trace lists must match and be non-empty");
  }
  return in;
}

}  // namespace

int cmd_calibrate(const GlobalOptions& g) {
  const json cfg = load_config(g.config);
  require_keys(cfg,
               {"manifest", "traces_v1", "traces_v2", "v1_nm_s", "v2_nm_s",
                "viscosity_pa_s", "radius_um", "fit_range_um",
                "extra_ranges_um", "resample_step_nm", "output"},
               {"v1_nm_s", "v2_nm_s", "viscosity_pa_s", "radius_um"},
               "calibrate config");
  const auto base = g.config.parent_path();
  const CalibrationInputs in = calibration_inputs(g, cfg, base);
  const double eta = get_number(cfg, "viscosity_pa_s");
  const double radius = get_number(cfg, "radius_um") * 1e-6;
  const double step = get_number_or(cfg, "resample_step_nm", 0.5);

  caslif::FitRange fit_range{100.0, 1500.0};
  if (cfg.count("fit_range_um")) {
    fit_range = {cfg.at("fit_range_um").at(0).get<double>() * 1e3,
                 cfg.at("fit_range_um").at(1).get<double>() * 1e3};
  }
  std::vector<caslif::FitRange> extra;
  if (cfg.count("extra_ranges_um")) {
    for (const auto& r : cfg.at("extra_ranges_um")) {
      extra.push_back({r.at(0).get<double>() * 1e3, r.at(1).get<double>() * 1e3});
    }
  }

  if (!caslif::hydro_limit_ok(fit_range.max_nm * 1e-9, radius)) {
    std::cerr << "note: fit range extends past R/20 = "
              << radius * 1e9 / 20.0
              << " nm; the lubrication form is advisory there\n";
  }

  // per-run velocity combination, then average the combined runs
  std::vector<caslif::SampledSignal> combined(in.v1_files.size());
  caslif::parallel_for(in.v1_files.size(), g.threads, [&](std::size_t r) {
    const auto s1 = prepare_trace(in.v1_files[r], step);
    const auto s2 = prepare_trace(in.v2_files[r], step);
    combined[r] = caslif::combine_hydro(s2, s1);
  });
  const caslif::SampledSignal hydro = average_signals(combined);
  const double v_eff = (in.v2 - in.v1) * 1e-9;

  const caslif::CalibrationFit fit =
      caslif::fit_hydro_calibration(hydro, eta, radius, v_eff, fit_range);
  std::vector<caslif::CalibrationFit> extra_fits;
  for (const auto& r : extra) {
    extra_fits.push_back(caslif::fit_hydro_calibration(hydro, eta, radius, v_eff, r));
  }

  const std::string out_base =
      cfg.count("output") ? cfg.at("output").get<std::string>() : "calibration";

  std::ostringstream rep;
  rep << "hydrodynamic calibration\n";
  rep << "  runs averaged        : " << in.v1_files.size() << "\n";
  rep << "  effective velocity   : " << fmt(v_eff * 1e9, "%.3f") << " nm/s\n";
  rep << "  viscosity            : " << fmt(eta) << " Pa s\n";
  rep << "  sphere radius        : " << fmt(radius * 1e6, "%.3f") << " um\n";
  rep << "  fit range            : " << fmt(fit_range.min_nm / 1e3, "%.3f") << " - "
      << fmt(fit_range.max_nm / 1e3, "%.3f") << " um\n";
  rep << "  force constant C     : " << fmt(fit.force_constant_nn_per_v, "%.4f")
      << " +- " << fmt(fit.sigma_force_constant_nn_per_v, "%.4f") << " nN/V\n";
  rep << "  contact offset d0    : " << fmt(fit.contact_offset_nm, "%.3f")
      << " +- " << fmt(fit.sigma_contact_offset_nm, "%.3f") << " nm\n";
  rep << "  residual rms         : " << fmt(fit.residual_rms_pn, "%.3f") << " pN\n";
  rep << "  iterations           : " << fit.iterations << "\n";
  if (!extra_fits.empty()) {
    rep << "\nfit-range sensitivity\n";
    rep << "  range_um        C_nN_per_V     d0_nm\n";
    auto row = [&rep](const caslif::CalibrationFit& f) {
      rep << "  " << fmt(f.range_nm.min_nm / 1e3, "%.2f") << "-"
          << fmt(f.range_nm.max_nm / 1e3, "%.2f") << "      "
          << fmt(f.force_constant_nn_per_v, "%.3f") << " +- "
          << fmt(f.sigma_force_constant_nn_per_v, "%.3f") << "   "
          << fmt(f.contact_offset_nm, "%.2f") << " +- "
          << fmt(f.sigma_contact_offset_nm, "%.2f") << "\n";
    };
    row(fit);
    for (const auto& f : extra_fits) row(f);
  }
  caslif::atomic_write_text(resolve_out(g, out_base + ".txt"), rep.str());

  json doc;
  doc["force_constant_nn_per_v"] = fit.force_constant_nn_per_v;
  doc["contact_offset_nm"] = fit.contact_offset_nm;
  doc["sigma_force_constant_nn_per_v"] = fit.sigma_force_constant_nn_per_v;
  doc["sigma_contact_offset_nm"] = fit.sigma_contact_offset_nm;
  doc["residual_rms_pn"] = fit.residual_rms_pn;
  doc["fit_range_nm"] = {fit.range_nm.min_nm, fit.range_nm.max_nm};
  doc["runs"] = in.v1_files.size();
  json ranges = json::array();
  for (const auto& f : extra_fits) {
    json e;
    e["range_nm"] = {f.range_nm.min_nm, f.range_nm.max_nm};
    e["force_constant_nn_per_v"] = f.force_constant_nn_per_v;
    e["contact_offset_nm"] = f.contact_offset_nm;
    e["sigma_force_constant_nn_per_v"] = f.sigma_force_constant_nn_per_v;
    e["sigma_contact_offset_nm"] = f.sigma_contact_offset_nm;
    ranges.push_back(e);
  }
  doc["extra_ranges"] = ranges;
  caslif::atomic_write_text(resolve_out(g, out_base + ".json"),
                            doc.dump(2) + "\n");

  // residual series for systematic-error inspection
  caslif::write_table(resolve_out(g, out_base + "_residuals.txt"),
                      {{"content", "calibration fit residuals"}},
                      {"x_nm", "residual_pN"},
                      {fit.residual_x_nm, fit.residual_pn});

  std::cout << "C  = " << fmt(fit.force_constant_nn_per_v, "%.4f") << " +- "
            << fmt(fit.sigma_force_constant_nn_per_v, "%.4f") << " nN/V\n"
            << "d0 = " << fmt(fit.contact_offset_nm, "%.3f") << " +- "
            << fmt(fit.sigma_contact_offset_nm, "%.3f") << " nm\n";
  return 0;
}

int cmd_extract(const GlobalOptions& g) {
  const json cfg = load_config(g.config);
  require_keys(cfg,
               {"manifest", "traces_v1", "traces_v2", "v1_nm_s", "v2_nm_s",
                "calibration", "far_range_um", "histogram_nm", "histogram_bins",
                "resample_step_nm", "output_prefix"},
               {"v1_nm_s", "v2_nm_s", "calibration"}, "extract config");
  const auto base = g.config.parent_path();
  const CalibrationInputs in = calibration_inputs(g, cfg, base);
  if (std::fabs(in.v2 - 2.0 * in.v1) > 0.01 * std::fabs(2.0 * in.v1)) {
    throw config_error("extract: v2_nm_s must equal 2 x v1_nm_s within 1%");
  }
  const double step = get_number_or(cfg, "resample_step_nm", 0.5);

  double c_nn_per_v = 0.0, d0_nm = 0.0;
  const json& cal = cfg.at("calibration");
  if (cal.is_string()) {
    const json doc =
        load_config(resolve_workflow_in(g, base, cal.get<std::string>()));
    c_nn_per_v = get_number(doc, "force_constant_nn_per_v");
    d0_nm = get_number(doc, "contact_offset_nm");
  } else {
    require_keys(cal, {"force_constant_nn_per_v", "contact_offset_nm"},
                 {"force_constant_nn_per_v", "contact_offset_nm"},
                 "extract.calibration");
    c_nn_per_v = get_number(cal, "force_constant_nn_per_v");
    d0_nm = get_number(cal, "contact_offset_nm");
  }

  caslif::FitRange far_range{1000.0, 2500.0};
  if (cfg.count("far_range_um")) {
    far_range = {cfg.at("far_range_um").at(0).get<double>() * 1e3,
                 cfg.at("far_range_um").at(1).get<double>() * 1e3};
  }

  // per run: combine the (v1, 2 v1) pair, calibrate to force, strip the
  // linear background, and map onto separations d = x + d0
  std::vector<caslif::TracePoints> runs(in.v1_files.size());
  caslif::parallel_for(in.v1_files.size(), g.threads, [&](std::size_t r) {
    const auto s1 = prepare_trace(in.v1_files[r], step);
    const auto s2 = prepare_trace(in.v2_files[r], step);
    caslif::SampledSignal sig = caslif::combine_static(s1, s2);
    for (double& v : sig.values) v *= c_nn_per_v * 1e3;  // V -> pN
    auto [clean, bg] = caslif::subtract_linear_background(sig, far_range);
    caslif::TracePoints pts;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const double x = clean.x_at(i);
      if (x < 2.0) continue;  // compensated contact pile-up is not data
      pts.x_nm.push_back(x + d0_nm);
      pts.value.push_back(clean.values[i]);
    }
    runs[r] = std::move(pts);
  });

  const caslif::RunEnsemble ens = caslif::make_ensemble(runs);
  const caslif::EnsembleStats stats = caslif::average_ensemble(ens);

  const std::string prefix = cfg.count("output_prefix")
                                 ? cfg.at("output_prefix").get<std::string>()
                                 : "extract";

  std::vector<double> d_col(stats.d_nm.begin(), stats.d_nm.end());
  std::vector<double> n_col(stats.d_nm.size(),
                            static_cast<double>(ens.per_run.size()));
  caslif::write_table(
      resolve_out(g, prefix + "_curve.txt"),
      {{"content", "static force vs separation, ensemble statistics"},
       {"force_constant_nN_per_V", fmt(c_nn_per_v, "%.4f")},
       {"contact_offset_nm", fmt(d0_nm, "%.3f")},
       {"runs", fmt(static_cast<double>(ens.per_run.size()), "%.0f")}},
      {"d_nm", "F_mean_pN", "F_std_pN", "n_runs"},
      {d_col, stats.mean, stats.stddev, n_col});

  int written = 0;
  if (cfg.count("histogram_nm")) {
    const int bins = static_cast<int>(get_number_or(cfg, "histogram_bins", 12));
    for (const auto& dv : cfg.at("histogram_nm")) {
      const int d = dv.get<int>();
      const auto& samples = caslif::ensemble_samples_at(ens, d);
      const caslif::Histogram h = caslif::make_histogram(samples, bins);
      std::vector<double> lo(h.counts.size()), hi(h.counts.size()),
          count(h.counts.size());
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        lo[b] = h.lo + static_cast<double>(b) * h.bin_width;
        hi[b] = lo[b] + h.bin_width;
        count[b] = h.counts[b];
      }
      char name[128];
      std::snprintf(name, sizeof name, "%s_hist_%dnm.txt", prefix.c_str(), d);
      caslif::write_table(
          resolve_out(g, name),
          {{"content", "force histogram at fixed separation"},
           {"separation_nm", fmt(d, "%.0f")},
           {"samples", fmt(static_cast<double>(samples.size()), "%.0f")}},
          {"F_lo_pN", "F_hi_pN", "count"}, {lo, hi, count});
      ++written;
    }
  }

  std::cout << "wrote " << (prefix + "_curve.txt") << " ("
            << stats.d_nm.size() << " distances, " << ens.per_run.size()
            << " runs) and " << written << " histograms\n";
  return 0;
}

int cmd_conductivity_fit(const GlobalOptions& g, const ConductivityOptions& opt) {
  caslif::ConductivitySeries series = [&] {
    try {
      return caslif::read_conductivity_series(opt.input);
    } catch (const caslif::error& e) {
      throw caslif::invalid_input_error(e.what());
    }
  }();
  const caslif::LogLogFit fit = caslif::fit_conductivity_loglog(series);

  std::ostringstream rep;
  rep << "conductivity log-log fit\n";
  rep << "  points       : " << series.points.size() << "\n";
  rep << "  slope        : " << fmt(fit.slope, "%.6f") << "\n";
  rep << "  intercept    : " << fmt(fit.intercept, "%.6f") << "\n";
  rep << "  residual rms : " << fmt(fit.residual_rms, "%.6f") << " (log10 units)\n";
  caslif::atomic_write_text(resolve_out(g, opt.out_file), rep.str());
  std::cout << "slope = " << fmt(fit.slope, "%.6f") << " (rms "
            << fmt(fit.residual_rms, "%.6f") << ")\n";
  return 0;
}

}  // namespace cli
