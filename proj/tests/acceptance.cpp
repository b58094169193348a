// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "caslif/constants.hpp"
#include "caslif/fluid_forces.hpp"
#include "caslif/io.hpp"
#include "caslif/lifshitz.hpp"
#include "caslif/pipeline.hpp"
#include "caslif/synth.hpp"
#include "oracles.hpp"

using namespace caslif;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::filesystem::path data_dir() {
  const char* env = std::getenv("CASLIF_DATA");
  if (!env) {
    std::fprintf(stderr, "CASLIF_DATA must point at the data directory\n");
    std::exit(2);
  }
  return env;
}

DielectricModel gold_model() {
  static const DielectricModel m = DielectricModel::tabulated_with_drude_tail(
      read_optical_table(data_dir() / "optical" / "gold_im_eps.dat"),
      {7.50, 0.061}, 0.125);
  return m;
}

DielectricModel ethanol_model() {
  return DielectricModel::oscillator({23.84, 0.852, 6.60e14, 1.14e16});
}

LayerSystem gold_ethanol_gold() {
  return {gold_model(), gold_model(), ethanol_model(), 294.15, 19.9e-6};
}

oracles::BruteSide brute_gold() {
  const auto table =
      read_optical_table(data_dir() / "optical" / "gold_im_eps.dat");
  auto cache = std::make_shared<std::map<double, double>>();
  oracles::BruteSide s;
  s.eps = [table, cache](double xi) {
    auto it = cache->find(xi);
    if (it != cache->end()) return it->second;
    const double v = oracles::kk_trapezoid(table, {7.50, 0.061}, 0.125, xi);
    (*cache)[xi] = v;
    return v;
  };
  s.metal_at_zero = true;
  return s;
}

oracles::BruteSide brute_ethanol() {
  oracles::BruteSide s;
  s.eps = [](double xi) { return oracles::ethanol_two_oscillator(xi); };
  s.metal_at_zero = false;
  s.eps_static = oracles::ethanol_two_oscillator(0.0);
  return s;
}

std::string fmt(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SampledSignal standard_pipeline(const DeflectionTrace& t, double step = 0.5) {
  return resample_uniform(compensate_bending(align_contact_zero(t)), step);
}

SampledSignal average_signals(const std::vector<SampledSignal>& sigs) {
  double lo = -1e300, hi = 1e300;
  for (const auto& s : sigs) {
    lo = std::max(lo, s.x0_nm);
    hi = std::min(hi, s.x_last());
  }
  SampledSignal out = slice_signal(sigs.front(), lo, hi);
  for (std::size_t r = 1; r < sigs.size(); ++r) {
    const auto s = slice_signal(sigs[r], lo, hi);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += s.values[i];
  }
  for (double& v : out.values) v /= static_cast<double>(sigs.size());
  return out;
}

// ---------------------------------------------------------------------------

// 1. quasi-ideal metals in vacuum vs the ideal-metal closed form
Result criterion_ideal_metal() {
  const auto metal = DielectricModel::constant(1e8);
  const LayerSystem sys{metal, metal, DielectricModel::constant(1.0), 1.0,
                        19.9e-6};
  const double d = 100e-9;
  const double got = force_sphere_plate(sys, d);
  const double ideal = oracles::ideal_metal_force(19.9e-6, d);
  const double rel = std::fabs(got - ideal) / std::fabs(ideal);
  Result r;
  r.pass = rel < 0.02;
  r.detail = "F = " + fmt(got * 1e12) + " pN vs ideal " + fmt(ideal * 1e12) +
             " pN, rel " + fmt(rel, "%.2e") + " (tol 2e-2)";
  return r;
}

// 2. dense-grid brute-force equivalence at 25/50/100 nm
Result criterion_brute_force() {
  const auto sys = gold_ethanol_gold();
  const auto sphere = brute_gold();
  const auto medium = brute_ethanol();
  Result r;
  r.pass = true;
  for (double d_nm : {25.0, 50.0, 100.0}) {
    const double d = d_nm * 1e-9;
    const double got = force_sphere_plate(sys, d);
    const double ref =
        oracles::force_brute(sphere, sphere, medium, 294.15, 19.9e-6, d, 0.0);
    const double rel = std::fabs(got - ref) / std::fabs(ref);
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += fmt(d_nm, "%.0f") + " nm: rel " + fmt(rel, "%.2e");
    if (!(rel < 0.005)) r.pass = false;
  }
  r.detail += " (tol 5e-3)";
  return r;
}

// 3. log-log slope of the computed curve over 40-100 nm
Result criterion_retardation_scaling() {
  const auto sys = gold_ethanol_gold();
  const auto d = geometric_grid(40e-9, 100e-9, 13);
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) f[i] = force_sphere_plate(sys, d[i]);
  const double slope =
      power_law_exponent(ForceCurve::from_points(d, f), 40e-9, 100e-9);
  Result r;
  r.pass = slope > -3.3 && slope < -2.7;
  r.detail = "slope = " + fmt(slope, "%.3f") + " (window [-3.3, -2.7])";
  return r;
}

// 4. screening consistency: exact m=0 reduction and the ~15 pN change
Result criterion_screening() {
  const auto sys = gold_ethanol_gold();
  Result r;
  r.pass = true;
  {
    const double a = zero_freq_screened(sys, 30e-9, {0.0});
    const double b = matsubara_force_term(sys, 30e-9, 0);
    const double rel = std::fabs(a - b) / std::fabs(b);
    r.detail = "m0 reduction rel " + fmt(rel, "%.2e") + " (tol 1e-12)";
    if (!(rel <= 1e-12)) r.pass = false;
  }
  const SaltScreening salt{1.0 / 1e-9};  // lambda_D = 1 nm
  for (double d_nm : {25.0, 30.0}) {
    const double d = d_nm * 1e-9;
    const double change =
        std::fabs(force_with_salt(sys, d, salt) - force_sphere_plate(sys, d)) *
        1e12;
    r.detail += "; d=" + fmt(d_nm, "%.0f") + " nm change " +
                fmt(change, "%.1f") + " pN";
    if (!(change >= 5.0 && change <= 30.0)) r.pass = false;
  }
  r.detail += " (window 5-30 pN)";
  return r;
}

// 5. Debye lengths for the two experimental concentrations
Result criterion_debye() {
  const FluidProps ethanol{1.17e-3, 24.3, 294.0};
  const double l1 = debye_length({0.3, 1.0}, ethanol) * 1e9;
  const double l2 = debye_length({30.0, 1.0}, ethanol) * 1e9;
  Result r;
  r.pass = std::fabs(l1 - 10.0) <= 1.0 && std::fabs(l2 - 1.0) <= 0.1;
  r.detail = "0.3 mM: " + fmt(l1, "%.3f") + " nm (10 +- 1); 30 mM: " +
             fmt(l2, "%.4f") + " nm (1 +- 0.1)";
  return r;
}

// 6. electrostatic force window at d = 30 nm with V0 = 8 mV (back-solved)
Result criterion_electrostatic() {
  const double lo =
      std::fabs(electrostatic_force(30e-9, 8e-3, 19.9e-6, 24.3, 20e-9)) * 1e12;
  const double hi =
      std::fabs(electrostatic_force(30e-9, 8e-3, 19.9e-6, 24.3, 100e-9)) * 1e12;
  Result r;
  r.pass =
      std::fabs(lo - 6.0) <= 0.15 * 6.0 && std::fabs(hi - 21.0) <= 0.15 * 21.0;
  r.detail = "lambda 20 nm: " + fmt(lo, "%.2f") + " pN (6 +- 15%); 100 nm: " +
             fmt(hi, "%.2f") + " pN (21 +- 15%)";
  return r;
}

// 7. calibration round trip on 51 noisy synthetic hydro trace pairs.
// Scenario notes: a stiff lever keeps the two bending systematics (the
// near-contact velocity reduction and the noise-correlated compensation
// shift, both of which scale as 1/k and are exercised elsewhere) out of this
// round trip; 0.125 nm sampling and a 0.025-1.5 um fit window keep the
// white-noise information floor below the quoted uncertainties.
Result criterion_calibration() {
  SynthParams base;
  base.static_force = StaticForceModel::zero();
  base.spring_constant_n_per_m = 200.0;
  base.noise_sigma_pn = 110.0;
  base.sample_spacing_nm = 0.125;
  base.range_min_nm = -40.0;
  base.range_max_nm = 1600.0;
  base.seed = 7702;

  std::vector<SampledSignal> combined(51);
  for (int run = 0; run < 51; ++run) {
    SynthParams p1 = base;
    p1.velocity_nm_s = -450.0;
    p1.seed = derive_seed(base.seed, static_cast<std::uint64_t>(run) * 2);
    SynthParams p2 = base;
    p2.velocity_nm_s = -3600.0;
    p2.seed = derive_seed(base.seed, static_cast<std::uint64_t>(run) * 2 + 1);
    combined[static_cast<std::size_t>(run)] =
        combine_hydro(standard_pipeline(synth_trace(p2), 0.125),
                      standard_pipeline(synth_trace(p1), 0.125));
  }
  const SampledSignal hydro = average_signals(combined);
  const CalibrationFit fit = fit_hydro_calibration(
      hydro, base.viscosity_pa_s, base.radius_m, -3150.0e-9, {25.0, 1500.0});

  const double dc = fit.force_constant_nn_per_v - 14.5;
  const double dd0 = fit.contact_offset_nm - 12.0;
  Result r;
  r.pass = std::fabs(dc) <= 0.1 && std::fabs(dd0) <= 1.0;
  r.detail = "C = " + fmt(fit.force_constant_nn_per_v, "%.4f") + " nN/V (err " +
             fmt(dc, "%+.4f") + ", tol 0.1); d0 = " +
             fmt(fit.contact_offset_nm, "%.3f") + " nm (err " +
             fmt(dd0, "%+.3f") + ", tol 1.0)";
  return r;
}

// 8. combination identities on noiseless stiff-lever synthetics
Result criterion_combinations() {
  SynthParams base;
  const auto d = geometric_grid(3e-9, 4000e-9, 200);
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    f[i] = -800e-12 * std::pow(20e-9 / d[i], 3.0);
  }
  base.static_force = StaticForceModel::tabulated(ForceCurve::from_points(d, f))
                          .plus(StaticForceModel::electrostatic(
                              8e-3, 19.9e-6, 24.3, 50e-9));
  base.spring_constant_n_per_m = 1000.0;
  base.noise_sigma_pn = 0.0;

  auto make = [&](double v) {
    SynthParams p = base;
    p.velocity_nm_s = v;
    return standard_pipeline(synth_trace(p));
  };
  const auto s_v1 = make(-450.0);
  const auto s_2v1 = make(-900.0);
  const auto s_v2 = make(-3600.0);
  const double c_pn = base.force_constant_nn_per_v * 1e3;
  const double d0 = base.contact_offset_nm;

  auto check = [&](const SampledSignal& got,
                   const std::function<double(double)>& expect, double& worst) {
    double peak = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double x = got.x_at(i);
      if (x < 1.0 || x > 2500.0) continue;
      peak = std::max(peak, std::fabs(expect(x)));
    }
    bool ok = true;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double x = got.x_at(i);
      if (x < 1.0 || x > 2500.0) continue;
      const double e = expect(x);
      const double rel =
          std::fabs(got.values[i] - e) / std::max(std::fabs(e), 0.01 * peak);
      worst = std::max(worst, rel);
      if (rel > 1e-3) ok = false;
    }
    return ok;
  };

  double worst_h = 0.0, worst_s = 0.0;
  const auto hydro = combine_hydro(s_v2, s_v1);
  const bool ok_h = check(
      hydro,
      [&](double x) {
        return hydro_force((x + d0) * 1e-9, -3150.0e-9, base.viscosity_pa_s,
                           base.radius_m) *
               1e12 / c_pn;
      },
      worst_h);
  const auto stat = combine_static(s_v1, s_2v1);
  const bool ok_s = check(
      stat,
      [&](double x) {
        return (base.static_force.eval((x + d0) * 1e-9) * 1e12 +
                base.background_slope_pn_per_nm * x +
                base.background_offset_pn) /
               c_pn;
      },
      worst_s);

  Result r;
  r.pass = ok_h && ok_s;
  r.detail = "hydro worst rel " + fmt(worst_h, "%.2e") + ", static worst rel " +
             fmt(worst_s, "%.2e") + " (tol 1e-3 pointwise)";
  return r;
}

// 9. fit-range sensitivity pattern on a soft lever with near-contact
// velocity reduction (noiseless)
Result criterion_fit_range_pattern() {
  SynthParams base;
  base.static_force = StaticForceModel::zero();
  base.spring_constant_n_per_m = 0.038;
  base.noise_sigma_pn = 0.0;
  base.range_min_nm = -120.0;
  base.range_max_nm = 1600.0;

  auto make = [&](double v) {
    SynthParams p = base;
    p.velocity_nm_s = v;
    return standard_pipeline(synth_trace(p));
  };
  const auto hydro = combine_hydro(make(-3600.0), make(-450.0));

  auto fit_over = [&](double lo_um, double hi_um) {
    return fit_hydro_calibration(hydro, base.viscosity_pa_s, base.radius_m,
                                 -3150.0e-9, {lo_um * 1e3, hi_um * 1e3});
  };
  const CalibrationFit narrow = fit_over(0.05, 1.00);
  const CalibrationFit wide1 = fit_over(0.10, 1.50);
  const CalibrationFit wide2 = fit_over(0.15, 1.50);

  const double dc_rel =
      (narrow.force_constant_nn_per_v - wide1.force_constant_nn_per_v) /
      wide1.force_constant_nn_per_v;
  const double dd0 = narrow.contact_offset_nm - wide1.contact_offset_nm;
  const double wide_dc =
      std::fabs(wide1.force_constant_nn_per_v - wide2.force_constant_nn_per_v);
  const double wide_dd0 =
      std::fabs(wide1.contact_offset_nm - wide2.contact_offset_nm);

  Result r;
  const bool narrow_shifts = std::fabs(dc_rel) >= 0.01 &&
                             std::fabs(dc_rel) <= 0.04 && dd0 >= 1.5 &&
                             dd0 <= 6.0;
  // the two wide ranges carry +-0.1 nN/V and +-1 / +-2 nm; they must agree
  // within those uncertainties
  const bool wides_agree = wide_dc <= 0.2 && wide_dd0 <= 3.0;
  r.pass = narrow_shifts && wides_agree;
  r.detail = "narrow vs wide: dC/C = " + fmt(dc_rel * 100.0, "%.2f") +
             "% (window 1-4%), dd0 = " + fmt(dd0, "%+.2f") +
             " nm (window +1.5..+6); wide pair: dC = " + fmt(wide_dc, "%.3f") +
             " nN/V (tol 0.2), dd0 = " + fmt(wide_dd0, "%.2f") + " nm (tol 3)";
  return r;
}

// 10. full pipeline round trip: simulate -> align -> combine -> calibrate ->
// extract -> average, against the injected Lifshitz curve
Result criterion_end_to_end() {
  const auto sys = gold_ethanol_gold();

  // injected static force: the library's own computed curve, tabulated
  const auto grid = geometric_grid(5e-9, 3200e-9, 257);
  std::vector<double> force(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    force[i] = force_sphere_plate(sys, grid[i]);
  }
  const auto injected =
      StaticForceModel::tabulated(ForceCurve::from_points(grid, force));

  SynthParams base;
  base.static_force = injected;
  base.spring_constant_n_per_m = 5.0;
  // pooled per-distance samples carry sqrt(5 * 2/3) x the raw trace noise
  // through the three-trace combination and resampling; 60 pN lands the
  // pooled spread at ~110 pN, the centre of the quoted band. 0.25 nm
  // sampling pools 4 samples per run and nm, tightening the per-distance
  // spread estimates enough to sit inside the band.
  base.noise_sigma_pn = 60.0;
  base.sample_spacing_nm = 0.25;
  base.seed = 424242;

  const int n_runs = 51;
  std::vector<SampledSignal> cal_combined(n_runs);
  std::vector<SampledSignal> static_combined(n_runs);
  for (int run = 0; run < n_runs; ++run) {
    // per-run drift, shared by the three velocities of the run
    std::mt19937_64 dr(derive_seed(base.seed, static_cast<std::uint64_t>(run)));
    const double u1 = (static_cast<double>(dr() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(dr() >> 11) * 0x1.0p-53;
    const double drift =
        2.0 * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);

    auto make = [&](double v, std::uint64_t stream) {
      SynthParams p = base;
      p.velocity_nm_s = v;
      p.drift_offset_nm = drift;
      p.seed = derive_seed(base.seed,
                           1000 + static_cast<std::uint64_t>(run) * 8 + stream);
      return standard_pipeline(synth_trace(p), 0.25);
    };
    const auto s_v1 = make(-450.0, 0);
    const auto s_2v1 = make(-900.0, 1);
    const auto s_v2 = make(-3600.0, 2);
    cal_combined[static_cast<std::size_t>(run)] = combine_hydro(s_v2, s_v1);
    static_combined[static_cast<std::size_t>(run)] = combine_static(s_v1, s_2v1);
  }

  // calibrate on the averaged hydro combination
  const SampledSignal hydro = average_signals(cal_combined);
  const CalibrationFit cal = fit_hydro_calibration(
      hydro, base.viscosity_pa_s, base.radius_m, -3150.0e-9, {25.0, 1500.0});

  // calibrate, strip the background, and map each run onto separations
  std::vector<TracePoints> runs(static_combined.size());
  const double v_to_pn = cal.force_constant_nn_per_v * 1e3;
  for (std::size_t r = 0; r < static_combined.size(); ++r) {
    SampledSignal sig = static_combined[r];
    for (double& v : sig.values) v *= v_to_pn;
    auto [clean, bg] = subtract_linear_background(sig, {1000.0, 2500.0});
    TracePoints pts;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const double x = clean.x_at(i);
      if (x < 2.0) continue;  // contact pile-up at the axis origin
      pts.x_nm.push_back(x + cal.contact_offset_nm);
      pts.value.push_back(clean.values[i]);
    }
    runs[r] = std::move(pts);
  }
  const RunEnsemble ens = make_ensemble(runs);
  const EnsembleStats stats = average_ensemble(ens);

  // compare to the injected curve on the 20-100 nm grid; the per-distance
  // spread of the data is the pooled-sample standard deviation (runs are
  // pooled per 1 nm bin, as the histograms are)
  bool within_band = true;
  double worst_pull = 0.0;
  int worst_d = 0;
  double std_lo = 1e300, std_hi = 0.0;
  bool band_ok = true;
  int points = 0;
  for (std::size_t g = 0; g < stats.d_nm.size(); ++g) {
    const int d = stats.d_nm[g];
    if (d < 20 || d > 100) continue;
    ++points;
    const auto& pooled = ensemble_samples_at(ens, d);
    double pm = 0.0;
    for (double v : pooled) pm += v;
    pm /= static_cast<double>(pooled.size());
    double pss = 0.0;
    for (double v : pooled) pss += (v - pm) * (v - pm);
    const double pooled_std =
        std::sqrt(pss / (static_cast<double>(pooled.size()) - 1.0));

    const double truth = injected.eval(d * 1e-9) * 1e12;
    const double pull = std::fabs(stats.mean[g] - truth) / pooled_std;
    if (pull > worst_pull) {
      worst_pull = pull;
      worst_d = d;
    }
    if (pull > 1.0) within_band = false;
    if (d >= 30 && d <= 80) {
      std_lo = std::min(std_lo, pooled_std);
      std_hi = std::max(std_hi, pooled_std);
      if (pooled_std < 90.0 || pooled_std > 130.0) band_ok = false;
    }
  }

  // per-distance histograms of the injected white noise stay near-Gaussian
  bool gaussian_ok = true;
  double worst_moment = 0.0;
  for (int d : {30, 45, 80}) {
    const auto& samples = ensemble_samples_at(ens, d);
    const double sk = oracles::skewness(samples);
    const double ku = oracles::excess_kurtosis(samples);
    worst_moment = std::max({worst_moment, std::fabs(sk), std::fabs(ku)});
    if (std::fabs(sk) > 0.5 || std::fabs(ku) > 0.5) gaussian_ok = false;
  }

  Result r;
  r.pass = within_band && band_ok && gaussian_ok && points == 81;
  r.detail = "C = " + fmt(cal.force_constant_nn_per_v, "%.3f") + " nN/V, d0 = " +
             fmt(cal.contact_offset_nm, "%.2f") + " nm; " + fmt(points, "%.0f") +
             " grid points; worst |mean-truth|/std = " + fmt(worst_pull, "%.2f") +
             " at " + fmt(worst_d, "%.0f") + " nm (tol 1); std over 30-80 nm " +
             fmt(std_lo, "%.0f") + "-" + fmt(std_hi, "%.0f") +
             " pN (band 90-130); worst |skew|,|kurt| at 30/45/80 nm = " +
             fmt(worst_moment, "%.2f") + " (tol 0.5)";
  return r;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Result()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "ideal-metal oracle", 10.0, criterion_ideal_metal},
      {2, "brute-force equivalence", 60.0, criterion_brute_force},
      {3, "retardation scaling", 60.0, criterion_retardation_scaling},
      {4, "screening consistency", 60.0, criterion_screening},
      {5, "debye lengths", 1.0, criterion_debye},
      {6, "electrostatic window", 1.0, criterion_electrostatic},
      {7, "calibration round-trip", 60.0, criterion_calibration},
      {8, "combination identities", 30.0, criterion_combinations},
      {9, "fit-range sensitivity", 120.0, criterion_fit_range_pattern},
      {10, "end-to-end pipeline", 300.0, criterion_end_to_end},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = c.run();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    const bool in_time = dt <= c.limit_s;
    const bool pass = res.pass && in_time;
    std::printf("%s criterion %2d: %-24s %s [%.2f s, limit %.0f s]\n",
                pass ? "PASS" : "FAIL", c.id, c.name, res.detail.c_str(), dt,
                c.limit_s);
    if (!pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
