#include "caslif/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"
#include "caslif/fluid_forces.hpp"

namespace caslif {

namespace {

// Box-Muller on the raw engine output; std::normal_distribution is
// implementation-defined, this keeps seeded traces identical everywhere.
double gauss(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// log-log linear interpolation of an attractive curve, extrapolating with the
// boundary slopes
struct LogLogCurve {
  std::vector<double> ld;  // log separation
  std::vector<double> lf;  // log |force|

  explicit LogLogCurve(const ForceCurve& c) {
    ld.reserve(c.separation_m.size());
    lf.reserve(c.separation_m.size());
    for (std::size_t i = 0; i < c.separation_m.size(); ++i) {
      if (!(c.force_n[i] < 0.0)) {
        throw invalid_input_error(
            "tabulated static force model needs strictly attractive forces");
      }
      ld.push_back(std::log(c.separation_m[i]));
      lf.push_back(std::log(-c.force_n[i]));
    }
  }

  double eval(double d_m) const {
    const double x = std::log(d_m);
    std::size_t hi = std::upper_bound(ld.begin(), ld.end(), x) - ld.begin();
    hi = std::clamp<std::size_t>(hi, 1, ld.size() - 1);
    const std::size_t lo = hi - 1;
    const double t = (x - ld[lo]) / (ld[hi] - ld[lo]);
    return -std::exp(lf[lo] + t * (lf[hi] - lf[lo]));
  }
};

}  // namespace

struct StaticForceModel::Impl {
  struct Electro {
    double v0, radius, eps, debye;
  };
  std::vector<Electro> electro;
  std::vector<LogLogCurve> curves;
  std::vector<std::string> names;
};

StaticForceModel StaticForceModel::zero() {
  return StaticForceModel(std::make_shared<Impl>());
}

StaticForceModel StaticForceModel::electrostatic(double v0_volt, double radius_m,
                                                 double static_dielectric,
                                                 double debye_length_m) {
  auto impl = std::make_shared<Impl>();
  impl->electro.push_back({v0_volt, radius_m, static_dielectric, debye_length_m});
  std::ostringstream n;
  n << "electrostatic(V0=" << v0_volt * 1e3 << "mV, lambda_D="
    << debye_length_m * 1e9 << "nm)";
  impl->names.push_back(n.str());
  return StaticForceModel(std::move(impl));
}

StaticForceModel StaticForceModel::tabulated(ForceCurve curve) {
  auto impl = std::make_shared<Impl>();
  impl->curves.emplace_back(curve);
  std::ostringstream n;
  n << "tabulated(" << curve.separation_m.size() << " points, "
    << curve.separation_m.front() * 1e9 << "-"
    << curve.separation_m.back() * 1e9 << "nm)";
  impl->names.push_back(n.str());
  return StaticForceModel(std::move(impl));
}

StaticForceModel StaticForceModel::plus(const StaticForceModel& other) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->electro.insert(impl->electro.end(), other.impl_->electro.begin(),
                       other.impl_->electro.end());
  impl->curves.insert(impl->curves.end(), other.impl_->curves.begin(),
                      other.impl_->curves.end());
  impl->names.insert(impl->names.end(), other.impl_->names.begin(),
                     other.impl_->names.end());
  return StaticForceModel(std::move(impl));
}

double StaticForceModel::eval(double d_m) const {
  double f = 0.0;
  for (const auto& e : impl_->electro) {
    f += electrostatic_force(d_m, e.v0, e.radius, e.eps, e.debye);
  }
  for (const auto& c : impl_->curves) f += c.eval(d_m);
  return f;
}

std::string StaticForceModel::describe() const {
  if (impl_->names.empty()) return "zero";
  std::string out;
  for (const auto& n : impl_->names) {
    if (!out.empty()) out += " + ";
    out += n;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

DeflectionTrace synth_trace(const SynthParams& p, SynthTruth* truth) {
  if (!(p.force_constant_nn_per_v > 0.0) || !(p.spring_constant_n_per_m > 0.0) ||
      !(p.radius_m > 0.0)) {
    throw invalid_input_error("synth needs positive C, k and R");
  }
  if (!(p.sample_spacing_nm > 0.0) || p.sample_spacing_nm > 0.5) {
    throw invalid_input_error("synth sample spacing must be in (0, 0.5] nm");
  }
  if (!(p.range_max_nm > p.range_min_nm)) {
    throw invalid_input_error("synth range must be increasing");
  }
  if (p.range_max_nm - p.drift_offset_nm + p.contact_offset_nm <= 0.0) {
    throw invalid_input_error("synth range has no positive-separation samples");
  }
  if (p.velocity_nm_s >= 0.0) {
    throw invalid_input_error("synth models approach traces (velocity < 0)");
  }

  const double c_si = p.force_constant_nn_per_v * 1e-9;  // N/V
  const double k = p.spring_constant_n_per_m;
  const double v_nominal = p.velocity_nm_s;
  const double dx = p.sample_spacing_nm;
  const auto n_samples = static_cast<std::size_t>(
      std::floor((p.range_max_nm - p.range_min_nm) / dx)) + 1;

  std::mt19937_64 rng(p.seed);

  // total signal-model force (N) at tip separation d (m) and tip velocity
  // (nm/s); includes the linear detector artifact A x + B per the recorded
  // piezo position x (nm)
  auto f_total = [&](double d_m, double v_tip_nm_s, double x_rec_nm) {
    const double f_static = p.static_force.eval(d_m);
    const double f_hydro =
        p.viscosity_pa_s > 0.0
            ? hydro_force(d_m, v_tip_nm_s * 1e-9, p.viscosity_pa_s, p.radius_m)
            : 0.0;
    const double artifact =
        (p.background_slope_pn_per_nm * x_rec_nm + p.background_offset_pn) * 1e-12;
    return f_static + f_hydro + artifact;
  };

  DeflectionTrace out;
  out.velocity_nm_s = p.velocity_nm_s;
  out.sample_rate_hz = std::fabs(p.velocity_nm_s) / dx;
  out.label = p.label;
  out.piezo_nm.reserve(n_samples);
  out.detector_v.reserve(n_samples);
  if (truth) {
    *truth = {};
    truth->tip_separation_nm.reserve(n_samples);
    truth->cantilever_nm.reserve(n_samples);
    truth->tip_velocity_nm_s.reserve(n_samples);
  }

  bool in_contact = false;
  double dc_prev = 0.0;  // converged deflection of the previous sample, nm
  int history = 0;

  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x_rec = p.range_max_nm - static_cast<double>(i) * dx;
    const double x_true = x_rec - p.drift_offset_nm;

    double dc = 0.0;  // cantilever deflection, nm
    double v_tip = v_nominal;
    if (!in_contact) {
      // implicit per-sample balance: y = F_total(d(y), v_tip(y))/k with the
      // tip velocity from the backward difference to the previous sample.
      // Solving it implicitly keeps the sample-to-sample recursion stable;
      // an explicit velocity lag oscillates once |F_hydro| > k dx.
      auto g_of = [&](double y) {
        const double d_tip_nm = std::max(x_true + y + p.contact_offset_nm, 0.05);
        const double vt = history >= 1
                              ? v_nominal * (1.0 + (y - dc_prev) / (-dx))
                              : v_nominal;
        return f_total(d_tip_nm * 1e-9, vt, x_rec) / k * 1e9;  // nm
      };

      double y = history >= 1 ? dc_prev : 0.0;
      // local contraction estimate sets the starting damping; the hydro
      // velocity coupling makes the raw map slope strongly negative
      const double g0 = g_of(y);
      const double gp = (g_of(y + 0.01) - g0) / 0.01;
      double damping = gp < 1.0 ? std::clamp(1.0 / (1.0 - gp), 1e-6, 1.0) : 0.25;
      double prev_res = std::numeric_limits<double>::infinity();
      bool converged = false;
      for (int it = 0; it < 300; ++it) {
        const double res = g_of(y) - y;
        if (std::fabs(res) <= 1e-3) {
          // take the refined value so the defect drops by the contraction
          // factor; leaving y one step behind quantizes the deflection at
          // the tolerance scale and leaks noise into the tip velocity
          y += res;
          v_tip = history >= 1 ? v_nominal * (1.0 + (y - dc_prev) / (-dx))
                               : v_nominal;
          converged = true;
          break;
        }
        if (std::fabs(res) > prev_res) damping *= 0.5;
        if (damping < 1e-9) break;  // no contraction anywhere: no solution
        prev_res = std::fabs(res);
        y += damping * res;
      }
      if (!converged || x_true + y <= 0.0) {
        // either touched the surface or snapped (no stable deflection exists
        // once the attractive force gradient exceeds k)
        in_contact = true;
        if (!converged && truth) {
          truth->snapped = true;
          truth->snap_piezo_nm = x_rec;
        }
      } else {
        dc = y;
      }
    }
    if (in_contact) {
      dc = -x_true;  // tip pinned at the surface
      v_tip = 0.0;
    }

    const double d_tip_nm = in_contact ? p.contact_offset_nm
                                       : x_true + dc + p.contact_offset_nm;
    const double artifact =
        (p.background_slope_pn_per_nm * x_rec + p.background_offset_pn) * 1e-12;
    const double f_signal = in_contact ? (k * dc * 1e-9 + artifact)
                                       : f_total(d_tip_nm * 1e-9, v_tip, x_rec);
    const double noise =
        p.noise_sigma_pn > 0.0
            ? gauss(rng) * (p.noise_sigma_pn * 1e-12 / c_si)
            : 0.0;
    out.piezo_nm.push_back(x_rec);
    out.detector_v.push_back(f_signal / c_si + noise);
    if (truth) {
      truth->tip_separation_nm.push_back(d_tip_nm);
      truth->cantilever_nm.push_back(dc);
      truth->tip_velocity_nm_s.push_back(v_tip);
    }

    dc_prev = dc;
    ++history;
  }

  return DeflectionTrace::from_samples(std::move(out.piezo_nm),
                                       std::move(out.detector_v),
                                       out.velocity_nm_s, out.sample_rate_hz,
                                       out.label);
}

std::vector<EnsembleRun> synth_ensemble(const SynthParams& base, int n_runs,
                                        double drift_mean_nm,
                                        double drift_sigma_nm) {
  if (n_runs < 1) throw invalid_input_error("ensemble needs n_runs >= 1");
  std::vector<EnsembleRun> out;
  out.reserve(static_cast<std::size_t>(n_runs));
  for (int r = 0; r < n_runs; ++r) {
    const auto run_index = static_cast<std::uint64_t>(r);
    std::mt19937_64 drift_rng(derive_seed(base.seed, run_index * 2 + 1));
    const double drift =
        drift_mean_nm + (drift_sigma_nm > 0.0 ? drift_sigma_nm * gauss(drift_rng) : 0.0);
    SynthParams p = base;
    p.seed = derive_seed(base.seed, run_index * 2);
    p.drift_offset_nm = drift;
    std::ostringstream label;
    label << (base.label.empty() ? "run" : base.label) << r;
    p.label = label.str();
    EnsembleRun run{DeflectionTrace{}, SynthTruth{}, drift, p.seed};
    run.trace = synth_trace(p, &run.truth);
    out.push_back(std::move(run));
  }
  return out;
}

}  // namespace caslif
