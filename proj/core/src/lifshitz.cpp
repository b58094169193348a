#include "caslif/lifshitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"

namespace caslif {

namespace {

using constants::c_light;
using constants::k_boltzmann;

// Exponential window of the u-substituted k-integrals: integrands carry
// e^{-u}, so a width-60 window past the lower edge bounds the truncation
// error at ~e^-60 of the integrand scale.
constexpr double u_window = 60.0;

void check_system(const LayerSystem& sys, double d_m) {
  if (!(d_m > 0.0)) throw domain_error("separation must be positive");
  if (!(sys.sphere_radius_m > 0.0)) throw invalid_input_error("sphere radius must be positive");
  if (!(sys.temperature_k > 0.0)) throw invalid_input_error("temperature must be positive");
}

// k-integral of one m >= 1 Matsubara term, substituted as u = 2 k3 d so the
// integrand decays as e^{-u}:
//   I = (1/4d^2) * integral du u [ln(1 - r1te r2te e^-u) + ln(1 - r1tm r2tm e^-u)]
// with k3 = u/2d, k^2 = k3^2 - e3 xi^2/c^2 and ki^2 = k^2 + ei xi^2/c^2.
double term_integral_m(double e1, double e2, double e3, double xi, double d,
                       const QuadratureOptions& quad) {
  const double xi_c = xi / c_light;
  const double umin = 2.0 * d * std::sqrt(e3) * xi_c;

  auto integrand = [&](double u) {
    const double k3 = u / (2.0 * d);
    // k_i^2 = k^2 + e_i xi^2/c^2 written against k3 so identical media give
    // k_i = k3 (and vanishing amplitudes) exactly
    const double k1i = std::sqrt(std::max(0.0, k3 * k3 + (e1 - e3) * xi_c * xi_c));
    const double k2i = std::sqrt(std::max(0.0, k3 * k3 + (e2 - e3) * xi_c * xi_c));
    const double rte = (k1i - k3) / (k1i + k3) * (k2i - k3) / (k2i + k3);
    const double rtm = (k1i * e3 - k3 * e1) / (k1i * e3 + k3 * e1) *
                       (k2i * e3 - k3 * e2) / (k2i * e3 + k3 * e2);
    const double w = std::exp(-u);
    return u * (std::log1p(-rte * w) + std::log1p(-rtm * w));
  };

  const QuadratureResult r =
      integrate_adaptive(integrand, umin, umin + u_window, quad);
  return r.value / (4.0 * d * d);
}

struct ZeroFreqSide {
  bool metal;
  double eps0;  // static permittivity when not metallic
};

ZeroFreqSide zero_freq_side(const DielectricModel& m) {
  const auto v = m.static_value();
  if (!v.has_value()) return {true, 0.0};
  return {false, *v};
}

// Salt-screened zero-frequency k-integral (TM only; the TE amplitude vanishes
// at xi = 0). u = 2 d sqrt(k^2 + kappa^2); metals enter in the eps -> inf
// limit where the bracket is exactly 1.
double zero_freq_integral(const ZeroFreqSide& s1, const ZeroFreqSide& s2,
                          double e3, double d, double kappa,
                          const QuadratureOptions& quad) {
  const double umin = 2.0 * d * kappa;

  auto bracket = [&](const ZeroFreqSide& s, double k, double bigK) {
    if (s.metal) return 1.0;
    return (s.eps0 * k - e3 * bigK) / (s.eps0 * k + e3 * bigK);
  };
  auto integrand = [&](double u) {
    const double bigK = u / (2.0 * d);
    const double k = std::sqrt(std::max(0.0, bigK * bigK - kappa * kappa));
    const double b = bracket(s1, k, bigK) * bracket(s2, k, bigK);
    return u * std::log1p(-b * std::exp(-u));
  };

  const QuadratureResult r =
      integrate_adaptive(integrand, umin, umin + u_window, quad);
  return r.value / (4.0 * d * d);
}

// sum over m >= 1 with automatic truncation: hard floor m >= 10 c/(2 d xi1)
// (the dominant frequency scale is c/2d), then stop once the geometric tail
// estimate drops below tail_rel_tol of the partial sum.
double positive_m_sum(const LayerSystem& sys, double d,
                      const MatsubaraOptions& opts) {
  const double xi1 = matsubara_spacing(sys.temperature_k);
  const double pref = k_boltzmann * sys.temperature_k * sys.sphere_radius_m;
  const int hard_floor =
      static_cast<int>(std::ceil(10.0 * c_light / (2.0 * d * xi1)));
  constexpr int m_cap = 5'000'000;

  double sum = 0.0;
  double prev = 0.0;
  for (int m = 1;; ++m) {
    const double xi = m * xi1;
    const double term = pref * term_integral_m(sys.sphere.eval(xi),
                                               sys.plate.eval(xi),
                                               sys.medium.eval(xi), xi, d,
                                               opts.quadrature);
    sum += term;

    if (opts.m_max > 0) {
      if (m >= opts.m_max) break;
    } else if (m >= std::max(hard_floor, 2)) {
      double tail = 0.0;
      if (term != 0.0 && prev != 0.0) {
        const double rho = std::fabs(term) / std::fabs(prev);
        tail = rho < 1.0 ? std::fabs(term) * rho / (1.0 - rho)
                         : std::numeric_limits<double>::infinity();
      }
      if (tail <= opts.tail_rel_tol * std::fabs(sum)) break;
    }
    if (m >= m_cap) {
      std::ostringstream msg;
      msg << "matsubara sum did not converge by m=" << m << " (d=" << d
          << " m, partial=" << sum << " N)";
      throw numerical_error(msg.str());
    }
    prev = term;
  }
  return sum;
}

}  // namespace

RoughnessDistribution RoughnessDistribution::from_bins(std::vector<Bin> bins) {
  if (bins.empty()) throw invalid_input_error("roughness distribution needs bins");
  double total = 0.0;
  for (const Bin& b : bins) {
    if (!(b.fraction >= 0.0)) {
      throw invalid_input_error("roughness fractions must be >= 0");
    }
    total += b.fraction;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "roughness fractions must sum to 1 (got " << total << ")";
    throw invalid_input_error(msg.str());
  }
  RoughnessDistribution d;
  d.bins = std::move(bins);
  return d;
}

double RoughnessDistribution::max_displacement_m() const {
  double mx = bins.front().displacement_m;
  for (const Bin& b : bins) mx = std::max(mx, b.displacement_m);
  return mx;
}

ForceCurve ForceCurve::from_points(std::vector<double> separation_m,
                                   std::vector<double> force_n) {
  if (separation_m.size() != force_n.size() || separation_m.empty()) {
    throw invalid_input_error("force curve needs matching non-empty columns");
  }
  double prev = 0.0;
  for (double d : separation_m) {
    if (!(d > prev)) {
      throw invalid_input_error(
          "force curve separations must be positive and strictly increasing");
    }
    prev = d;
  }
  ForceCurve c;
  c.separation_m = std::move(separation_m);
  c.force_n = std::move(force_n);
  return c;
}

double fresnel_te(double k_per_m, double xi_rad_s, double eps_i, double eps3) {
  if (k_per_m < 0.0 || xi_rad_s < 0.0) {
    throw invalid_input_error("fresnel amplitudes need k >= 0 and xi >= 0");
  }
  if (k_per_m == 0.0 && xi_rad_s == 0.0) {
    throw invalid_input_error("fresnel amplitude indeterminate at k = xi = 0");
  }
  const double xi_c = xi_rad_s / c_light;
  const double ki = std::sqrt(k_per_m * k_per_m + eps_i * xi_c * xi_c);
  const double k3 = std::sqrt(k_per_m * k_per_m + eps3 * xi_c * xi_c);
  return (ki - k3) / (ki + k3);
}

double fresnel_tm(double k_per_m, double xi_rad_s, double eps_i, double eps3) {
  if (k_per_m < 0.0 || xi_rad_s < 0.0) {
    throw invalid_input_error("fresnel amplitudes need k >= 0 and xi >= 0");
  }
  if (k_per_m == 0.0 && xi_rad_s == 0.0) {
    throw invalid_input_error("fresnel amplitude indeterminate at k = xi = 0");
  }
  const double xi_c = xi_rad_s / c_light;
  const double ki = std::sqrt(k_per_m * k_per_m + eps_i * xi_c * xi_c);
  const double k3 = std::sqrt(k_per_m * k_per_m + eps3 * xi_c * xi_c);
  return (ki * eps3 - k3 * eps_i) / (ki * eps3 + k3 * eps_i);
}

double zero_freq_screened(const LayerSystem& sys, double d_m,
                          const SaltScreening& salt) {
  check_system(sys, d_m);
  if (salt.inverse_debye_m < 0.0) {
    throw invalid_input_error("inverse Debye length must be >= 0");
  }
  const auto e3 = sys.medium.static_value();
  if (!e3.has_value()) {
    throw invalid_input_error(
        "medium needs a finite static permittivity for the m=0 term");
  }
  const double j =
      zero_freq_integral(zero_freq_side(sys.sphere), zero_freq_side(sys.plate),
                         *e3, d_m, salt.inverse_debye_m, {});
  return 0.5 * k_boltzmann * sys.temperature_k * sys.sphere_radius_m * j;
}

double force_with_salt(const LayerSystem& sys, double d_m,
                       const SaltScreening& salt, const MatsubaraOptions& opts) {
  return zero_freq_screened(sys, d_m, salt) + positive_m_sum(sys, d_m, opts);
}

double force_sphere_plate(const LayerSystem& sys, double d_m,
                          const MatsubaraOptions& opts) {
  return force_with_salt(sys, d_m, SaltScreening{0.0}, opts);
}

double matsubara_force_term(const LayerSystem& sys, double d_m, int m,
                            const QuadratureOptions& quad) {
  check_system(sys, d_m);
  if (m < 0) throw invalid_input_error("matsubara index must be >= 0");
  if (m == 0) return zero_freq_screened(sys, d_m, SaltScreening{0.0});
  const double xi = m * matsubara_spacing(sys.temperature_k);
  return k_boltzmann * sys.temperature_k * sys.sphere_radius_m *
         term_integral_m(sys.sphere.eval(xi), sys.plate.eval(xi),
                         sys.medium.eval(xi), xi, d_m, quad);
}

double roughness_correct(const std::function<double(double)>& base_force_n,
                         const RoughnessDistribution& sphere,
                         const RoughnessDistribution& plate, double d_m) {
  if (!(d_m > 0.0)) throw domain_error("separation must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < sphere.bins.size(); ++i) {
    for (std::size_t j = 0; j < plate.bins.size(); ++j) {
      const double shifted = d_m - (sphere.bins[i].displacement_m +
                                    plate.bins[j].displacement_m);
      if (!(shifted > 0.0)) {
        std::ostringstream msg;
        msg << "roughness-shifted separation not positive: d=" << d_m
            << " m with sphere bin " << i << " (delta="
            << sphere.bins[i].displacement_m << " m) and plate bin " << j
            << " (delta=" << plate.bins[j].displacement_m << " m)";
        throw domain_error(msg.str());
      }
      sum += sphere.bins[i].fraction * plate.bins[j].fraction *
             base_force_n(shifted);
    }
  }
  return sum;
}

double power_law_exponent(const ForceCurve& curve, double d_min_m,
                          double d_max_m) {
  std::vector<double> lx, ly;
  int sign = 0;
  for (std::size_t i = 0; i < curve.separation_m.size(); ++i) {
    const double d = curve.separation_m[i];
    if (d < d_min_m || d > d_max_m) continue;
    const double f = curve.force_n[i];
    const int s = f > 0.0 ? 1 : (f < 0.0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) {
      throw invalid_input_error(
          "power-law exponent needs forces of one sign in range");
    }
    sign = s;
    lx.push_back(std::log(d));
    ly.push_back(std::log(std::fabs(f)));
  }
  if (lx.size() < 5) {
    throw invalid_input_error("power-law exponent needs >= 5 points in range");
  }
  // least-squares slope
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> geometric_grid(double min_m, double max_m, int points) {
  if (!(min_m > 0.0) || !(max_m > min_m) || points < 2) {
    throw invalid_input_error("geometric grid needs 0 < min < max, points >= 2");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  const double ratio = std::log(max_m / min_m) / (points - 1);
  for (int i = 0; i < points; ++i) {
    g[static_cast<std::size_t>(i)] = min_m * std::exp(i * ratio);
  }
  g.front() = min_m;
  g.back() = max_m;
  return g;
}

}  // namespace caslif
