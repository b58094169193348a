#include "caslif/fluid_forces.hpp"

#include <cmath>
#include <limits>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"

namespace caslif {

double hydro_force(double d_m, double v_mps, double viscosity_pa_s,
                   double radius_m) {
  if (!(d_m > 0.0)) throw domain_error("hydro force needs d > 0");
  if (!(radius_m > 0.0) || !(viscosity_pa_s > 0.0)) {
    throw invalid_input_error("hydro force needs positive radius and viscosity");
  }
  const double coef = -6.0 * M_PI * viscosity_pa_s * radius_m * radius_m / d_m;
  return coef * v_mps;
}

bool hydro_limit_ok(double d_m, double radius_m) {
  return d_m <= radius_m / 20.0;
}

double electrostatic_force(double d_m, double v0_volt, double radius_m,
                           double static_dielectric, double debye_length_m) {
  if (!(d_m > 0.0)) throw domain_error("electrostatic force needs d > 0");
  if (!(debye_length_m > 0.0)) {
    throw domain_error("electrostatic force needs lambda_D > 0");
  }
  if (!(radius_m > 0.0) || !(static_dielectric >= 1.0)) {
    throw invalid_input_error("electrostatic force needs R > 0 and eps >= 1");
  }
  return -M_PI * radius_m * static_dielectric * constants::eps0 * v0_volt *
         v0_volt / d_m * std::exp(-d_m / debye_length_m);
}

double debye_length(const ElectrolyteSpec& spec, const FluidProps& fluid) {
  using namespace constants;
  if (spec.concentration_mol_m3 < 0.0 || spec.charge_number < 1.0) {
    throw invalid_input_error("electrolyte needs c >= 0 and z >= 1");
  }
  if (!(fluid.static_dielectric > 0.0) || !(fluid.temperature_k > 0.0)) {
    throw invalid_input_error("fluid needs positive dielectric and temperature");
  }
  if (spec.concentration_mol_m3 == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double z2 = spec.charge_number * spec.charge_number;
  return std::sqrt(fluid.static_dielectric * eps0 * k_boltzmann *
                   fluid.temperature_k /
                   (2.0 * avogadro * elementary_charge * elementary_charge *
                    z2 * spec.concentration_mol_m3));
}

ConductivitySeries ConductivitySeries::from_points(std::vector<Point> points) {
  if (points.size() < 3) {
    throw invalid_input_error("conductivity series needs >= 3 points");
  }
  double prev = 0.0;
  for (const Point& p : points) {
    if (!(p.molarity_mol_l > prev)) {
      throw invalid_input_error(
          "conductivity molarities must be positive and strictly increasing");
    }
    if (!(p.conductivity_norm > 0.0)) {
      throw domain_error("conductivity values must be positive for a log-log fit");
    }
    prev = p.molarity_mol_l;
  }
  ConductivitySeries s;
  s.points = std::move(points);
  return s;
}

LogLogFit fit_conductivity_loglog(const ConductivitySeries& series) {
  const auto& pts = series.points;
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    const double x = std::log10(p.molarity_mol_l);
    const double y = std::log10(p.conductivity_norm);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& p : pts) {
    const double r = std::log10(p.conductivity_norm) -
                     (slope * std::log10(p.molarity_mol_l) + intercept);
    ss += r * r;
  }
  return {slope, intercept, std::sqrt(ss / n)};
}

}  // namespace caslif
