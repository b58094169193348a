#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "caslif/dielectrics.hpp"
#include "caslif/quadrature.hpp"

namespace caslif {

// Sphere / plate / medium system for the sphere-plate Lifshitz force.
struct LayerSystem {
  DielectricModel sphere;
  DielectricModel plate;
  DielectricModel medium;
  double temperature_k;
  double sphere_radius_m;
};

// kappa = 1/lambda_D; screens the zero-frequency term of the force.
struct SaltScreening {
  double inverse_debye_m = 0.0;
};

// Discrete histogram of surface displacements from an ideally smooth surface.
// fractions sum to 1 within 1e-9.
struct RoughnessDistribution {
  struct Bin {
    double fraction;
    double displacement_m;
  };
  std::vector<Bin> bins;

  static RoughnessDistribution from_bins(std::vector<Bin> bins);
  double max_displacement_m() const;
};

struct ForceCurve {
  std::vector<double> separation_m;  // strictly increasing, all > 0
  std::vector<double> force_n;       // negative = attractive
  std::vector<std::pair<std::string, std::string>> metadata;

  static ForceCurve from_points(std::vector<double> separation_m,
                                std::vector<double> force_n);
};

// Reflection amplitudes at imaginary frequency for radial wave vector k,
// between material i (eps_i) and the medium (eps3). Sign convention: material
// minus medium in the numerator. Requires (k, xi) != (0, 0).
double fresnel_te(double k_per_m, double xi_rad_s, double eps_i, double eps3);
double fresnel_tm(double k_per_m, double xi_rad_s, double eps_i, double eps3);

struct MatsubaraOptions {
  int m_max = 0;              // 0 = automatic truncation
  double tail_rel_tol = 1e-8; // stop when estimated tail < this x partial sum
  QuadratureOptions quadrature{};
};

// Sphere-plate Casimir-Lifshitz force at separation d (proximity form, the
// prefactor R acting on the plate-plate kernel). Negative = attractive.
double force_sphere_plate(const LayerSystem& sys, double d_m,
                          const MatsubaraOptions& opts = {});

// Salt-screened zero-frequency term (half-weighted, i.e. directly the m = 0
// contribution to the total force). kappa = 0 reproduces the unscreened m = 0
// term of force_sphere_plate exactly.
double zero_freq_screened(const LayerSystem& sys, double d_m,
                          const SaltScreening& salt);

// Full force with the m = 0 term replaced by its salt-screened form.
double force_with_salt(const LayerSystem& sys, double d_m,
                       const SaltScreening& salt,
                       const MatsubaraOptions& opts = {});

// Individual Matsubara contribution to the total force: m = 0 returns the
// half-weighted zero-frequency term, m >= 1 the full-weight term.
double matsubara_force_term(const LayerSystem& sys, double d_m, int m,
                            const QuadratureOptions& quad = {});

// Roughness-averaged force: sum over sphere/plate displacement pairs of the
// base force evaluated at the shifted separation. Throws domain_error naming
// the offending bin pair when a shifted separation is not positive.
double roughness_correct(const std::function<double(double)>& base_force_n,
                         const RoughnessDistribution& sphere,
                         const RoughnessDistribution& plate, double d_m);

// Least-squares slope of ln|F| vs ln d over [d_min, d_max]. Requires at least
// 5 points in range, all forces of one sign.
double power_law_exponent(const ForceCurve& curve, double d_min_m,
                          double d_max_m);

// Geometric separation grid, endpoints inclusive.
std::vector<double> geometric_grid(double min_m, double max_m, int points);

}  // namespace caslif
