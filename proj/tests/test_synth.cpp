#include <doctest.h>

#include <cmath>

#include "caslif/errors.hpp"
#include "caslif/fluid_forces.hpp"
#include "caslif/lifshitz.hpp"
#include "caslif/synth.hpp"

using namespace caslif;

namespace {

// attractive power law standing in for a computed force curve
StaticForceModel power_law_model(double f_at_20nm_pn, double exponent) {
  const auto d = geometric_grid(3e-9, 4000e-9, 200);
  std::vector<double> f(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    f[i] = -f_at_20nm_pn * 1e-12 * std::pow(20e-9 / d[i], exponent);
  }
  return StaticForceModel::tabulated(ForceCurve::from_points(d, f));
}

}  // namespace

TEST_CASE("zero forces and zero noise give the bare detector line") {
  SynthParams p;
  p.static_force = StaticForceModel::zero();
  p.viscosity_pa_s = 0.0;
  p.noise_sigma_pn = 0.0;
  p.background_slope_pn_per_nm = 0.05;
  p.background_offset_pn = 30.0;
  p.range_min_nm = -50.0;
  p.range_max_nm = 900.0;
  const DeflectionTrace t = synth_trace(p);
  const double c_si = p.force_constant_nn_per_v * 1e-9;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.piezo_nm[i] < 2.0) continue;  // free region only
    const double expect =
        (p.background_slope_pn_per_nm * t.piezo_nm[i] + p.background_offset_pn) *
        1e-12 / c_si;
    CHECK(t.detector_v[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("seeded generation is bit-reproducible") {
  SynthParams p;
  p.static_force = power_law_model(800.0, 3.0);
  p.noise_sigma_pn = 110.0;
  p.seed = 42;
  const DeflectionTrace a = synth_trace(p);
  const DeflectionTrace b = synth_trace(p);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.piezo_nm[i] == b.piezo_nm[i]);
    CHECK(a.detector_v[i] == b.detector_v[i]);
  }
}

TEST_CASE("ensemble runs are identical without drift and noise") {
  SynthParams p;
  p.noise_sigma_pn = 0.0;
  const auto runs = synth_ensemble(p, 3, 0.0, 0.0);
  REQUIRE(runs.size() == 3);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    REQUIRE(runs[r].trace.size() == runs[0].trace.size());
    for (std::size_t i = 0; i < runs[0].trace.size(); ++i) {
      CHECK(runs[r].trace.detector_v[i] == runs[0].trace.detector_v[i]);
    }
  }
}

TEST_CASE("stiff cantilever removes the bending feedback") {
  SynthParams p;
  p.static_force = power_law_model(600.0, 3.0);
  p.spring_constant_n_per_m = 1e8;
  p.noise_sigma_pn = 0.0;
  p.velocity_nm_s = -3150.0;
  SynthTruth truth;
  const DeflectionTrace t = synth_trace(p, &truth);
  const double c_si = p.force_constant_nn_per_v * 1e-9;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t.piezo_nm[i];
    if (x < 1.0) continue;
    const double d = (x + p.contact_offset_nm) * 1e-9;
    const double expect =
        p.static_force.eval(d) +
        hydro_force(d, p.velocity_nm_s * 1e-9, p.viscosity_pa_s, p.radius_m) +
        (p.background_slope_pn_per_nm * x + p.background_offset_pn) * 1e-12;
    CHECK(t.detector_v[i] * c_si == doctest::Approx(expect).epsilon(1e-6));
    CHECK(std::fabs(truth.cantilever_nm[i]) < 1e-4);
  }
}

TEST_CASE("tip velocity drops near contact for a soft cantilever") {
  SynthParams p;
  p.viscosity_pa_s = 1.17e-3;
  p.spring_constant_n_per_m = 0.07;
  p.velocity_nm_s = -3600.0;
  p.noise_sigma_pn = 0.0;
  p.range_min_nm = -80.0;
  SynthTruth truth;
  const DeflectionTrace t = synth_trace(p, &truth);

  double v_far = 0.0, v_min = 1e30;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double ratio = truth.tip_velocity_nm_s[i] / p.velocity_nm_s;
    if (t.piezo_nm[i] > 1500.0) v_far = std::max(v_far, ratio);
    if (truth.tip_velocity_nm_s[i] != 0.0) v_min = std::min(v_min, ratio);
  }
  CHECK(v_far == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(v_min < 0.9);  // clearly reduced before contact
}

TEST_CASE("snap-to-contact is flagged, not silent") {
  SynthParams p;
  // strong short-range attraction against a soft lever: the gradient exceeds
  // k well before the surfaces meet
  p.static_force = power_law_model(3000.0, 3.0);
  p.spring_constant_n_per_m = 0.05;
  p.noise_sigma_pn = 0.0;
  p.velocity_nm_s = -450.0;
  SynthTruth truth;
  const DeflectionTrace t = synth_trace(p, &truth);
  CHECK(truth.snapped);
  CHECK(truth.snap_piezo_nm > p.range_min_nm);
  CHECK(truth.snap_piezo_nm < 100.0);
  // the trace still carries a contact line after the jump
  CHECK(t.size() > 100);
}

TEST_CASE("ensemble drift offsets are drawn per run") {
  SynthParams p;
  p.noise_sigma_pn = 0.0;
  const auto runs = synth_ensemble(p, 8, 3.0, 2.0);
  double mean = 0.0;
  bool all_same = true;
  for (const auto& r : runs) {
    mean += r.drift_nm;
    all_same = all_same && r.drift_nm == runs[0].drift_nm;
  }
  mean /= static_cast<double>(runs.size());
  CHECK_FALSE(all_same);
  CHECK(std::fabs(mean - 3.0) < 3.0);
}

TEST_CASE("synth parameter validation") {
  SynthParams p;
  p.spring_constant_n_per_m = 0.0;
  CHECK_THROWS_AS(synth_trace(p), invalid_input_error);
  p = {};
  p.sample_spacing_nm = 0.9;  // violates the 2-per-nm density floor
  CHECK_THROWS_AS(synth_trace(p), invalid_input_error);
  p = {};
  p.velocity_nm_s = 450.0;  // retract traces are not modelled
  CHECK_THROWS_AS(synth_trace(p), invalid_input_error);
  p = {};
  p.range_min_nm = 100.0;
  p.range_max_nm = 50.0;
  CHECK_THROWS_AS(synth_trace(p), invalid_input_error);
}
