#include "caslif/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "caslif/errors.hpp"
#include "caslif/least_squares.hpp"

namespace caslif {

DeflectionTrace DeflectionTrace::from_samples(std::vector<double> piezo_nm,
                                              std::vector<double> detector_v,
                                              double velocity_nm_s,
                                              double sample_rate_hz,
                                              std::string label) {
  if (piezo_nm.size() != detector_v.size()) {
    throw invalid_input_error("trace columns must have equal length");
  }
  if (piezo_nm.size() < 100) {
    throw invalid_input_error("trace needs at least 100 samples");
  }
  if (velocity_nm_s == 0.0 || !(sample_rate_hz > 0.0)) {
    throw invalid_input_error("trace needs nonzero velocity and positive sample rate");
  }
  const bool ascending = piezo_nm.back() > piezo_nm.front();
  double max_gap = 0.0;
  for (std::size_t i = 1; i < piezo_nm.size(); ++i) {
    const double step = ascending ? piezo_nm[i] - piezo_nm[i - 1]
                                  : piezo_nm[i - 1] - piezo_nm[i];
    if (!(step > 0.0)) {
      throw invalid_input_error("piezo displacement must be strictly monotone");
    }
    max_gap = std::max(max_gap, step);
  }
  if (max_gap > 0.5 * 1.05) {
    throw invalid_input_error(
        "trace undersampled: need >= 2 samples per nm everywhere");
  }
  DeflectionTrace t;
  t.piezo_nm = std::move(piezo_nm);
  t.detector_v = std::move(detector_v);
  t.velocity_nm_s = velocity_nm_s;
  t.sample_rate_hz = sample_rate_hz;
  t.label = std::move(label);
  return t;
}

namespace {

DeflectionTrace oriented_ascending(const DeflectionTrace& t) {
  if (t.piezo_nm.back() >= t.piezo_nm.front()) return t;
  DeflectionTrace out = t;
  std::reverse(out.piezo_nm.begin(), out.piezo_nm.end());
  std::reverse(out.detector_v.begin(), out.detector_v.end());
  return out;
}

double segment_slope(const std::vector<double>& x, const std::vector<double>& y,
                     std::size_t first, std::size_t count, double* intercept) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(count);
  for (std::size_t i = first; i < first + count; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (intercept) *intercept = (sy - slope * sx) / n;
  return slope;
}

}  // namespace

AlignedTrace align_contact_zero(const DeflectionTrace& raw) {
  const DeflectionTrace t = oriented_ascending(raw);
  const std::size_t n = t.size();
  const auto& x = t.piezo_nm;
  const auto& v = t.detector_v;

  // far-field reference: detrended noise over the farthest quarter
  const std::size_t far_first = 3 * n / 4;
  double far_b = 0.0;
  const double far_slope =
      segment_slope(x, v, far_first, n - far_first, &far_b);
  double ss = 0.0;
  for (std::size_t i = far_first; i < n; ++i) {
    const double r = v[i] - (far_slope * x[i] + far_b);
    ss += r * r;
  }
  const double far_rms = std::sqrt(ss / static_cast<double>(n - far_first));

  // Traces terminate in contact, so the detection seeds a line fit on the
  // most-advanced window and grows it over every contiguous sample consistent
  // with the line. (Selecting the globally steepest window instead would
  // latch onto snap-in jumps, which are steeper than the contact line.)
  const std::size_t region = std::max<std::size_t>(n / 5, 40);
  const std::size_t w = std::max<std::size_t>(25, n / 100);
  if (region < 2 * w) {
    throw analysis_error("trace too short for contact-line detection");
  }
  const double dx_med = (x[n - 1] - x[0]) / static_cast<double>(n - 1);
  const double seed_slope = segment_slope(x, v, 0, w, nullptr);
  const bool stands_out =
      std::fabs(seed_slope) > 5.0 * std::fabs(far_slope) + 1e-12 &&
      std::fabs(seed_slope) * static_cast<double>(w) * dx_med > 4.0 * far_rms;
  if (!stands_out) {
    std::ostringstream msg;
    msg << "no contact region found: terminal window slope " << seed_slope
        << " V/nm vs far-field slope " << far_slope << " V/nm, far rms "
        << far_rms << " V";
    throw analysis_error(msg.str());
  }

  std::size_t seg_first = 0;
  std::size_t seg_last = w;
  double intercept = 0.0;
  double slope = segment_slope(x, v, seg_first, seg_last - seg_first, &intercept);
  for (int pass = 0; pass < 3; ++pass) {
    if (slope == 0.0) throw analysis_error("degenerate contact-line slope");
    const double tol =
        std::max(4.0 * far_rms, 0.75 * std::fabs(slope) * dx_med);
    auto on_line = [&](std::size_t i) {
      return std::fabs(v[i] - (slope * x[i] + intercept)) <= tol;
    };
    std::size_t hi = seg_last;
    while (hi < region && on_line(hi)) ++hi;
    seg_last = hi;
    slope = segment_slope(x, v, seg_first, seg_last - seg_first, &intercept);
  }
  if (slope == 0.0) throw analysis_error("degenerate contact-line slope");
  const double x_zero = -intercept / slope;

  AlignedTrace out;
  out.trace = t;
  for (double& xi : out.trace.piezo_nm) xi -= x_zero;
  out.sensitivity_nm_per_v = 1.0 / std::fabs(slope);
  out.shift_nm = x_zero;
  out.contact_slope_v_per_nm = slope;
  out.contact_span_nm = x[seg_last - 1] - x[seg_first];
  out.far_rms_v = far_rms;
  out.contact_zero_applied = true;

  // sanity: when the V = 0 crossing lies inside the fitted segment, the
  // sample nearest the new origin must sit near zero. (Fast approaches on
  // soft levers stay hydro-cushioned, so the crossing is an extrapolation
  // of the contact line and carries no nearby sample.)
  if (x_zero >= x[seg_first] && x_zero <= x[seg_last - 1]) {
    std::size_t nearest = seg_first;
    double best_d = std::numeric_limits<double>::max();
    for (std::size_t i = seg_first; i < seg_last; ++i) {
      const double d = std::fabs(out.trace.piezo_nm[i]);
      if (d < best_d) {
        best_d = d;
        nearest = i;
      }
    }
    const double band = 6.0 * far_rms + 1.5 * std::fabs(slope) * dx_med;
    if (std::fabs(v[nearest]) > band) {
      std::ostringstream msg;
      msg << "contact alignment sanity check failed: |V|="
          << std::fabs(v[nearest]) << " V at the contact point exceeds band "
          << band << " V";
      throw analysis_error(msg.str());
    }
  }
  return out;
}

TracePoints compensate_bending(const AlignedTrace& t) {
  if (!t.contact_zero_applied) {
    throw invalid_input_error("bending compensation needs an aligned trace");
  }
  TracePoints out;
  out.velocity_nm_s = t.trace.velocity_nm_s;
  out.x_nm.resize(t.trace.size());
  out.value = t.trace.detector_v;
  for (std::size_t i = 0; i < t.trace.size(); ++i) {
    out.x_nm[i] =
        t.trace.piezo_nm[i] + t.sensitivity_nm_per_v * t.trace.detector_v[i];
  }
  return out;
}

namespace {

// common uniform-grid overlap of two signals; throws on mismatched grids
struct Overlap {
  std::size_t ia, ib, n;
  double x0;
};

Overlap grid_overlap(const SampledSignal& a, const SampledSignal& b) {
  if (std::fabs(a.step_nm - b.step_nm) > 1e-12) {
    throw analysis_error("incompatible grids: different steps");
  }
  const double phase = (a.x0_nm - b.x0_nm) / a.step_nm;
  if (std::fabs(phase - std::llround(phase)) > 1e-6) {
    throw analysis_error("incompatible grids: misaligned phase");
  }
  const double lo = std::max(a.x0_nm, b.x0_nm);
  const double hi = std::min(a.x_last(), b.x_last());
  if (hi < lo - 1e-12) throw analysis_error("incompatible grids: no overlap");
  const auto ia = static_cast<std::size_t>(std::llround((lo - a.x0_nm) / a.step_nm));
  const auto ib = static_cast<std::size_t>(std::llround((lo - b.x0_nm) / b.step_nm));
  const auto nn = static_cast<std::size_t>(std::llround((hi - lo) / a.step_nm)) + 1;
  return {ia, ib, nn, lo};
}

}  // namespace

SampledSignal combine_hydro(const SampledSignal& at_v2, const SampledSignal& at_v1) {
  const Overlap ov = grid_overlap(at_v2, at_v1);
  SampledSignal out;
  out.x0_nm = ov.x0;
  out.step_nm = at_v2.step_nm;
  out.velocity_nm_s = at_v2.velocity_nm_s - at_v1.velocity_nm_s;
  out.values.resize(ov.n);
  for (std::size_t i = 0; i < ov.n; ++i) {
    out.values[i] = at_v2.values[ov.ia + i] - at_v1.values[ov.ib + i];
  }
  return out;
}

SampledSignal combine_static(const SampledSignal& at_v1, const SampledSignal& at_2v1) {
  const double expected = 2.0 * at_v1.velocity_nm_s;
  if (std::fabs(at_2v1.velocity_nm_s - expected) > 0.01 * std::fabs(expected)) {
    std::ostringstream msg;
    msg << "velocity ratio violation: second trace at " << at_2v1.velocity_nm_s
        << " nm/s, expected 2 x " << at_v1.velocity_nm_s << " nm/s within 1%";
    throw invalid_input_error(msg.str());
  }
  const Overlap ov = grid_overlap(at_v1, at_2v1);
  SampledSignal out;
  out.x0_nm = ov.x0;
  out.step_nm = at_v1.step_nm;
  out.velocity_nm_s = 0.0;
  out.values.resize(ov.n);
  for (std::size_t i = 0; i < ov.n; ++i) {
    out.values[i] = 2.0 * at_v1.values[ov.ia + i] - at_2v1.values[ov.ib + i];
  }
  return out;
}

CalibrationFit fit_hydro_calibration(const SampledSignal& hydro_v,
                                     double viscosity_pa_s, double radius_m,
                                     double velocity_mps, FitRange fit_range) {
  if (fit_range.min_nm < hydro_v.x0_nm - 1e-9 ||
      fit_range.max_nm > hydro_v.x_last() + 1e-9) {
    throw invalid_input_error("calibration fit range outside the data span");
  }
  const SampledSignal s = slice_signal(hydro_v, fit_range.min_nm, fit_range.max_nm);
  if (s.size() < 10) {
    throw invalid_input_error("calibration fit range holds too few samples");
  }

  // model V(x) = amp / (C_si (x + d0)_si); parameters scaled to O(10):
  // p0 = C in nN/V, p1 = d0 in nm
  const double amp = -6.0 * M_PI * viscosity_pa_s * velocity_mps * radius_m * radius_m;
  const std::size_t nres = s.size();
  auto model = [&](double p0, double p1, double x_nm) {
    return amp * 1e18 / (p0 * (x_nm + p1));
  };
  auto residual = [&](const std::vector<double>& p, std::vector<double>& r) {
    for (std::size_t i = 0; i < nres; ++i) {
      r[i] = model(p[0], p[1], s.x_at(i)) - s.values[i];
    }
  };
  auto jacobian = [&](const std::vector<double>& p, std::vector<double>& J) {
    for (std::size_t i = 0; i < nres; ++i) {
      const double m = model(p[0], p[1], s.x_at(i));
      J[i * 2 + 0] = -m / p[0];
      J[i * 2 + 1] = -m / (s.x_at(i) + p[1]);
    }
  };

  // deterministic start: far-field amplitude ratio, d0 = 0
  double c0 = 0.0;
  int used = 0;
  for (std::size_t i = nres - std::max<std::size_t>(nres / 10, 2); i < nres; ++i) {
    if (std::fabs(s.values[i]) > 1e-12) {
      c0 += amp * 1e18 / (s.x_at(i) * s.values[i]);
      ++used;
    }
  }
  c0 = used > 0 ? c0 / used : 10.0;
  if (!(c0 > 0.0)) c0 = 10.0;

  const LevMarResult fit =
      levenberg_marquardt(residual, jacobian, {c0, 0.0}, nres);

  CalibrationFit out;
  out.force_constant_nn_per_v = fit.params[0];
  out.contact_offset_nm = fit.params[1];
  if (!(out.force_constant_nn_per_v > 0.0)) {
    throw fit_error("calibration produced a non-positive force constant");
  }
  if (out.contact_offset_nm < -1.0) {
    throw fit_error("calibration produced an unphysical negative contact offset");
  }
  out.contact_offset_nm = std::max(0.0, out.contact_offset_nm);
  out.range_nm = fit_range;
  out.sigma_force_constant_nn_per_v = fit.sigma[0];
  out.sigma_contact_offset_nm = fit.sigma[1];
  out.iterations = fit.iterations;
  const double v_to_pn = out.force_constant_nn_per_v * 1e3;
  out.residual_x_nm.resize(nres);
  out.residual_pn.resize(nres);
  double ss = 0.0;
  for (std::size_t i = 0; i < nres; ++i) {
    out.residual_x_nm[i] = s.x_at(i);
    out.residual_pn[i] = fit.residuals[i] * v_to_pn;
    ss += out.residual_pn[i] * out.residual_pn[i];
  }
  out.residual_rms_pn = std::sqrt(ss / static_cast<double>(nres));
  return out;
}

std::pair<SampledSignal, BackgroundFit> subtract_linear_background(
    const SampledSignal& static_pn, FitRange far_range) {
  if (far_range.min_nm < static_pn.x0_nm - 1e-9 ||
      far_range.max_nm > static_pn.x_last() + 1e-9) {
    throw invalid_input_error("background far-range outside the data span");
  }
  const SampledSignal far = slice_signal(static_pn, far_range.min_nm, far_range.max_nm);
  if (far.size() < 50) {
    throw invalid_input_error("background far-range needs >= 50 samples");
  }
  std::vector<double> xs(far.size()), ys(far.values);
  for (std::size_t i = 0; i < far.size(); ++i) xs[i] = far.x_at(i);
  const LinearFit line = fit_line(xs, ys);

  SampledSignal out = static_pn;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.values[i] -= line.slope * out.x_at(i) + line.intercept;
  }
  return {std::move(out), BackgroundFit{line.slope, line.intercept}};
}

RunEnsemble make_ensemble(const std::vector<TracePoints>& runs_d_f) {
  if (runs_d_f.size() < 2) {
    throw invalid_input_error("ensemble statistics need >= 2 runs");
  }
  struct Bin {
    double sum = 0.0;
    int count = 0;
    std::vector<double> raw;
  };
  std::vector<std::map<int, Bin>> binned(runs_d_f.size());
  for (std::size_t r = 0; r < runs_d_f.size(); ++r) {
    const auto& run = runs_d_f[r];
    for (std::size_t i = 0; i < run.x_nm.size(); ++i) {
      const int key = static_cast<int>(std::llround(run.x_nm[i]));
      Bin& b = binned[r][key];
      b.sum += run.value[i];
      b.count += 1;
      b.raw.push_back(run.value[i]);
    }
  }
  // intersect grids
  std::vector<int> common;
  for (const auto& [key, bin] : binned[0]) {
    bool everywhere = true;
    for (std::size_t r = 1; r < binned.size() && everywhere; ++r) {
      everywhere = binned[r].count(key) > 0;
    }
    if (everywhere) common.push_back(key);
  }
  if (common.empty()) throw analysis_error("empty grid overlap across runs");

  RunEnsemble ens;
  ens.grid_nm = common;
  ens.first_nm = common.front();
  ens.per_run.assign(runs_d_f.size(), std::vector<double>(common.size()));
  ens.pooled.assign(common.size(), {});
  for (std::size_t g = 0; g < common.size(); ++g) {
    for (std::size_t r = 0; r < binned.size(); ++r) {
      const Bin& b = binned[r][common[g]];
      ens.per_run[r][g] = b.sum / b.count;
      ens.pooled[g].insert(ens.pooled[g].end(), b.raw.begin(), b.raw.end());
    }
  }
  return ens;
}

EnsembleStats average_ensemble(const RunEnsemble& ens) {
  if (ens.per_run.size() < 2) {
    throw invalid_input_error("ensemble statistics need >= 2 runs");
  }
  const std::size_t nr = ens.per_run.size();
  const std::size_t ng = ens.grid_nm.size();
  EnsembleStats st;
  st.d_nm = ens.grid_nm;
  st.mean.resize(ng);
  st.stddev.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    double m = 0.0;
    for (std::size_t r = 0; r < nr; ++r) m += ens.per_run[r][g];
    m /= static_cast<double>(nr);
    double ss = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
      const double d = ens.per_run[r][g] - m;
      ss += d * d;
    }
    st.mean[g] = m;
    st.stddev[g] = std::sqrt(ss / static_cast<double>(nr - 1));
  }
  return st;
}

const std::vector<double>& ensemble_samples_at(const RunEnsemble& ens, int d_nm) {
  const auto it = std::find(ens.grid_nm.begin(), ens.grid_nm.end(), d_nm);
  if (it == ens.grid_nm.end()) {
    std::ostringstream msg;
    msg << "distance " << d_nm << " nm not on the ensemble grid";
    throw invalid_input_error(msg.str());
  }
  return ens.pooled[static_cast<std::size_t>(it - ens.grid_nm.begin())];
}

Histogram make_histogram(const std::vector<double>& samples, int n_bins) {
  if (samples.empty() || n_bins < 1) {
    throw invalid_input_error("histogram needs samples and >= 1 bin");
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  Histogram h;
  h.lo = *mn;
  h.bin_width = (*mx - *mn) / n_bins;
  if (h.bin_width == 0.0) h.bin_width = 1.0;
  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double s : samples) {
    auto idx = static_cast<std::size_t>((s - h.lo) / h.bin_width);
    if (idx >= h.counts.size()) idx = h.counts.size() - 1;
    ++h.counts[idx];
  }
  return h;
}

}  // namespace caslif
