#pragma once

#include <utility>
#include <vector>

#include "caslif/series.hpp"
#include "caslif/trace.hpp"

namespace caslif {

struct FitRange {
  double min_nm;
  double max_nm;
};

// Hydrodynamic calibration result: detector-volt to force conversion and the
// roughness-limited separation at contact.
struct CalibrationFit {
  double force_constant_nn_per_v = 0.0;  // C
  double contact_offset_nm = 0.0;        // d0
  FitRange range_nm{0.0, 0.0};
  double residual_rms_pn = 0.0;
  double sigma_force_constant_nn_per_v = 0.0;
  double sigma_contact_offset_nm = 0.0;
  int iterations = 0;
  std::vector<double> residual_x_nm;  // residual series for systematic checks
  std::vector<double> residual_pn;
};

// Linear detector background A*d + B (in series units, pN by convention).
struct BackgroundFit {
  double slope_pn_per_nm = 0.0;
  double offset_pn = 0.0;
};

// Force-vs-distance runs binned onto a common integer-nm grid.
struct RunEnsemble {
  int first_nm = 0;
  std::vector<int> grid_nm;                    // common grid, ascending
  std::vector<std::vector<double>> per_run;    // [run][grid index], bin means
  std::vector<std::vector<double>> pooled;     // [grid index] raw samples, all runs
};

struct EnsembleStats {
  std::vector<int> d_nm;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation across runs
};

struct Histogram {
  double lo = 0.0;
  double bin_width = 0.0;
  std::vector<int> counts;
};

// Locate the contact line (steepest linear segment at the advanced end of the
// trace), shift the piezo axis so its zero crossing sits at zero, and record
// the deflection sensitivity. Throws analysis_error when no contact-like
// segment stands out of the far-field behaviour.
AlignedTrace align_contact_zero(const DeflectionTrace& raw);

// Displacement axis corrected for cantilever bending: x -> x + S * V.
TracePoints compensate_bending(const AlignedTrace& t);

// Difference of two runs at different velocities on a common grid:
// removes every velocity-independent contribution, leaving the hydrodynamic
// signal at the effective velocity v2 - v1.
SampledSignal combine_hydro(const SampledSignal& at_v2, const SampledSignal& at_v1);

// 2 x (run at v1) - (run at 2 v1): cancels the hydrodynamic force, leaving
// the static force plus linear background. The second signal's velocity must
// be twice the first within 1%.
SampledSignal combine_static(const SampledSignal& at_v1, const SampledSignal& at_2v1);

// Nonlinear least squares of the lubrication model
//   V(x) = -6 pi eta v R^2 / (C (x + d0))
// over fit_range, on the bending-compensated displacement axis.
CalibrationFit fit_hydro_calibration(const SampledSignal& hydro_v,
                                     double viscosity_pa_s, double radius_m,
                                     double velocity_mps, FitRange fit_range);

// Fit a line over far_range (where the static force is negligible) and
// subtract it from the whole series.
std::pair<SampledSignal, BackgroundFit> subtract_linear_background(
    const SampledSignal& static_pn, FitRange far_range);

// Bin per-run (distance, force) samples to 1 nm steps and keep the grid
// common to every run. Requires >= 2 runs and a non-empty overlap.
RunEnsemble make_ensemble(const std::vector<TracePoints>& runs_d_f);

EnsembleStats average_ensemble(const RunEnsemble& ens);

// Pooled raw samples at one grid distance (across runs), e.g. for histograms.
const std::vector<double>& ensemble_samples_at(const RunEnsemble& ens, int d_nm);

Histogram make_histogram(const std::vector<double>& samples, int n_bins);

}  // namespace caslif
