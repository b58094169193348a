#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "caslif/lifshitz.hpp"
#include "caslif/trace.hpp"

namespace caslif {

// Velocity-independent force entering the trace forward model: zero, a
// screened-electrostatic term, a tabulated curve (log-log interpolated), or
// any sum of those. Forces must be attractive-or-zero per component so the
// log-log interpolation stays single-signed.
class StaticForceModel {
 public:
  static StaticForceModel zero();
  static StaticForceModel electrostatic(double v0_volt, double radius_m,
                                        double static_dielectric,
                                        double debye_length_m);
  static StaticForceModel tabulated(ForceCurve curve);
  StaticForceModel plus(const StaticForceModel& other) const;

  double eval(double d_m) const;  // N
  std::string describe() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit StaticForceModel(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
};

struct SynthParams {
  StaticForceModel static_force = StaticForceModel::zero();
  double viscosity_pa_s = 1.17e-3;
  double radius_m = 19.9e-6;
  double force_constant_nn_per_v = 14.5;  // C
  double spring_constant_n_per_m = 0.2;   // k
  double contact_offset_nm = 12.0;        // d0
  double background_slope_pn_per_nm = 0.02;  // A
  double background_offset_pn = 20.0;        // B
  double velocity_nm_s = -450.0;             // signed; negative = approach
  double noise_sigma_pn = 110.0;
  double drift_offset_nm = 0.0;   // horizontal offset of the recorded axis
  double sample_spacing_nm = 0.5;
  double range_min_nm = -50.0;    // recorded piezo axis span (contact near 0)
  double range_max_nm = 2600.0;
  std::uint64_t seed = 1;
  std::string label;
};

// Per-sample ground truth for round-trip harnesses.
struct SynthTruth {
  std::vector<double> tip_separation_nm;  // d = d_piezo + d(cantilever) + d0
  std::vector<double> cantilever_nm;
  std::vector<double> tip_velocity_nm_s;
  bool snapped = false;
  double snap_piezo_nm = 0.0;  // recorded-axis position of the jump
};

// Forward model of one approach trace: per sample the cantilever deflection
// solves d_c = F_total(d_piezo + d_c + d0, v_tip)/k by damped fixed point
// (1e-3 nm tolerance), with the hydrodynamic term using the causal tip
// velocity; past contact the tip is pinned and the detector follows the
// elastic contact line. Snap-to-contact (no fixed point once the attractive
// gradient exceeds k) is flagged in the truth record, never silently hidden.
DeflectionTrace synth_trace(const SynthParams& p, SynthTruth* truth = nullptr);

// Independent seeded runs with per-run normal drift of the recorded axis.
struct EnsembleRun {
  DeflectionTrace trace;
  SynthTruth truth;
  double drift_nm;
  std::uint64_t seed;
};
std::vector<EnsembleRun> synth_ensemble(const SynthParams& base, int n_runs,
                                        double drift_mean_nm,
                                        double drift_sigma_nm);

// Deterministic per-run seed derivation (splitmix64 over seed and run index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace caslif
