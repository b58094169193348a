#pragma once

#include <vector>

namespace caslif {

struct FluidProps {
  double viscosity_pa_s;
  double static_dielectric;
  double temperature_k;
};

// Fully dissociated z:z electrolyte at molar concentration c.
struct ElectrolyteSpec {
  double concentration_mol_m3;
  double charge_number = 1.0;
};

struct ConductivitySeries {
  struct Point {
    double molarity_mol_l;
    double conductivity_norm;
  };
  std::vector<Point> points;  // molarity strictly increasing, all > 0

  static ConductivitySeries from_points(std::vector<Point> points);
};

struct LogLogFit {
  double slope;
  double intercept;      // log10(conductivity) at log10(molarity) = 0
  double residual_rms;   // in log10 units
};

// Sphere-plate lubrication drag, valid for R >> d:
//   F = -6 pi eta v R^2 / d
// Approach (v < 0) gives a positive, opposing force.
double hydro_force(double d_m, double v_mps, double viscosity_pa_s,
                   double radius_m);

// The R >> d limit is advisory; callers may warn past d > R/20.
bool hydro_limit_ok(double d_m, double radius_m);

// Debye-screened sphere-plate electrostatic force from a fixed potential
// difference V0: F = -(pi R eps eps0 V0^2 / d) e^{-d/lambda_D}.
double electrostatic_force(double d_m, double v0_volt, double radius_m,
                           double static_dielectric, double debye_length_m);

// lambda_D = sqrt(eps eps0 k_B T / (2 N_A e^2 z^2 c)), both ion species
// counted. Zero concentration returns +infinity (no screening), which is a
// distinct non-error result.
double debye_length(const ElectrolyteSpec& spec, const FluidProps& fluid);

// Least-squares line through (log10 molarity, log10 conductivity).
LogLogFit fit_conductivity_loglog(const ConductivitySeries& series);

}  // namespace caslif
