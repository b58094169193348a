#include <doctest.h>

#include <cmath>
#include <random>

#include "caslif/errors.hpp"
#include "caslif/fluid_forces.hpp"

using namespace caslif;

TEST_CASE("hydrodynamic drag") {
  const double eta = 1.17e-3;
  const double R = 19.9e-6;

  CHECK(hydro_force(100e-9, 0.0, eta, R) == 0.0);

  // eta = 1.17 mPa s, R = 19.9 um, v = -3.150 um/s, d = 100 nm -> +275 pN
  const double f = hydro_force(100e-9, -3.150e-6, eta, R);
  CHECK(f == doctest::Approx(275.108e-12).epsilon(0.01));
  CHECK(f > 0.0);  // opposes approach

  // 1/d law: halving d doubles the force
  const double f2 = hydro_force(50e-9, -3.150e-6, eta, R);
  CHECK(f2 == doctest::Approx(2.0 * f).epsilon(1e-14));

  // odd and exactly linear in v
  for (double v : {-3.15e-6, -4.5e-7, 2.2e-6}) {
    const double base = hydro_force(80e-9, v, eta, R);
    CHECK(hydro_force(80e-9, -v, eta, R) == -base);
    for (double a : {2.0, 8.0, -3.0}) {
      CHECK(hydro_force(80e-9, a * v, eta, R) ==
            doctest::Approx(a * base).epsilon(1e-14));
    }
  }

  CHECK_THROWS_AS(hydro_force(0.0, -1e-6, eta, R), domain_error);
  CHECK_THROWS_AS(hydro_force(-1e-9, -1e-6, eta, R), domain_error);

  CHECK(hydro_limit_ok(100e-9, R));
  CHECK_FALSE(hydro_limit_ok(1.5e-6, R));  // d > R/20 is advisory territory
}

TEST_CASE("screened electrostatic force") {
  const double R = 19.9e-6;
  const double eps = 24.3;

  CHECK(electrostatic_force(30e-9, 0.0, R, eps, 50e-9) == 0.0);

  // unscreened limit
  const double d = 30e-9;
  const double v0 = 8e-3;
  const double unscreened = electrostatic_force(d, v0, R, eps, 1e30);
  CHECK(unscreened ==
        doctest::Approx(-M_PI * R * eps * 8.8541878128e-12 * v0 * v0 / d)
            .epsilon(1e-12));

  // V0 = 8 mV at d = 30 nm: |F| spans ~6 pN (lambda 20 nm) to ~21 pN (100 nm)
  CHECK(electrostatic_force(d, v0, R, eps, 20e-9) ==
        doctest::Approx(-6.4029e-12).epsilon(1e-3));
  CHECK(electrostatic_force(d, v0, R, eps, 100e-9) ==
        doctest::Approx(-21.2583e-12).epsilon(1e-3));

  // magnitude strictly decreasing in d and in 1/lambda
  double prev = 1e30;
  for (double dd = 10e-9; dd < 200e-9; dd *= 1.3) {
    const double m = std::fabs(electrostatic_force(dd, v0, R, eps, 40e-9));
    CHECK(m < prev);
    prev = m;
  }
  prev = 0.0;
  for (double lam = 5e-9; lam < 500e-9; lam *= 1.5) {
    const double m = std::fabs(electrostatic_force(d, v0, R, eps, lam));
    CHECK(m > prev);
    prev = m;
  }

  CHECK_THROWS_AS(electrostatic_force(-1e-9, v0, R, eps, 20e-9), domain_error);
  CHECK_THROWS_AS(electrostatic_force(d, v0, R, eps, 0.0), domain_error);
}

TEST_CASE("debye length") {
  const FluidProps ethanol{1.17e-3, 24.3, 294.0};

  // paper anchors: 0.3 mM -> 10 nm, 30 mM -> 1 nm (within 10%)
  const double lam1 = debye_length({0.3, 1.0}, ethanol);
  CHECK(lam1 == doctest::Approx(10e-9).epsilon(0.10));
  const double lam2 = debye_length({30.0, 1.0}, ethanol);
  CHECK(lam2 == doctest::Approx(1e-9).epsilon(0.10));

  // c^(-1/2) scaling: 100x concentration, exactly 10x shorter
  CHECK(lam1 / lam2 == doctest::Approx(10.0).epsilon(1e-12));

  // zero concentration signals infinite screening length, not an error
  CHECK(std::isinf(debye_length({0.0, 1.0}, ethanol)));

  // monotone in c and z
  double prev = 1e30;
  for (double c = 0.1; c < 100.0; c *= 3.0) {
    const double lam = debye_length({c, 1.0}, ethanol);
    CHECK(lam < prev);
    prev = lam;
  }
  CHECK(debye_length({1.0, 2.0}, ethanol) < debye_length({1.0, 1.0}, ethanol));

  CHECK_THROWS_AS(debye_length({-1.0, 1.0}, ethanol), invalid_input_error);
  CHECK_THROWS_AS(debye_length({1.0, 0.5}, ethanol), invalid_input_error);
}

TEST_CASE("conductivity log-log fit") {
  auto series_pow = [](double expn, double noise_frac, unsigned seed) {
    std::vector<ConductivitySeries::Point> pts;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double c = 1e-3; c <= 0.3; c *= 1.7) {
      double val = std::pow(c / 0.05, expn);
      if (noise_frac > 0.0) val *= 1.0 + noise_frac * u(rng);
      pts.push_back({c, val});
    }
    return ConductivitySeries::from_points(std::move(pts));
  };

  CHECK(fit_conductivity_loglog(series_pow(1.0, 0.0, 1)).slope ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit_conductivity_loglog(series_pow(0.9, 0.0, 1)).slope ==
        doctest::Approx(0.9).epsilon(1e-9));

  const auto noisy = fit_conductivity_loglog(series_pow(1.0, 0.02, 7));
  CHECK(noisy.slope > 0.95);
  CHECK(noisy.slope < 1.05);
  CHECK(noisy.residual_rms < 0.02);

  CHECK_THROWS_AS(ConductivitySeries::from_points({{0.1, 1.0}, {0.2, 2.0}}),
                  invalid_input_error);
  CHECK_THROWS_AS(
      ConductivitySeries::from_points({{0.1, 1.0}, {0.2, -2.0}, {0.3, 3.0}}),
      domain_error);
}
