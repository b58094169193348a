#pragma once

// Independent reference implementations used only by the test suites. These
// deliberately share no code with the library: fixed trapezoid grids instead
// of adaptive panels, explicit Matsubara loops, locally defined constants.

#include <functional>

#include "caslif/dielectrics.hpp"

namespace oracles {

// Kramers-Kronig transform by brute-force trapezoid integration on a 10x
// refined grid (Drude region, bridge, table, x^-3 tail all numeric).
double kk_trapezoid(const caslif::OpticalDataTable& table,
                    const caslif::DrudeParams& tail, double crossover_ev,
                    double xi_rad_s);

// Description of one body for the brute-force Lifshitz force.
struct BruteSide {
  std::function<double(double)> eps;  // eps(i xi) for xi > 0
  bool metal_at_zero = false;
  double eps_static = 0.0;  // used when metal_at_zero is false
};

// Sphere-plate Lifshitz force with a dense fixed trapezoid k-grid and an
// explicit m loop; kappa screens the m = 0 term. n_k points per integral.
double force_brute(const BruteSide& sphere, const BruteSide& plate,
                   const BruteSide& medium, double temperature_k,
                   double radius_m, double d_m, double kappa_per_m,
                   int n_k = 20000);

// Ideal-metal zero-temperature sphere-plate force (proximity form).
double ideal_metal_force(double radius_m, double d_m);

// Oracle-side dielectric evaluations (retyped formulas, no library calls).
double drude_eps(double xi_rad_s, double plasma_ev, double relaxation_ev);
double ethanol_two_oscillator(double xi_rad_s);

// Sample skewness and excess kurtosis.
double skewness(const std::vector<double>& v);
double excess_kurtosis(const std::vector<double>& v);

}  // namespace oracles
