#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace caslif {

// One row of tabulated absorption data: photon energy and Im[eps] at that
// energy. Energies must be strictly increasing, finite and positive.
struct OpticalDataTable {
  struct Row {
    double energy_ev;
    double im_eps;
  };
  std::vector<Row> rows;

  // throws invalid_input_error when the table invariants are violated
  static OpticalDataTable from_rows(std::vector<Row> rows);

  double min_energy_ev() const { return rows.front().energy_ev; }
  double max_energy_ev() const { return rows.back().energy_ev; }
};

struct DrudeParams {
  double plasma_freq_ev;  // omega_p
  double relaxation_ev;   // gamma
};

// eps(i xi) = 1 + C_ir/(1+(xi/w_ir)^2) + C_uv/(1+(xi/w_uv)^2)
struct OscillatorModel {
  double c_ir;
  double c_uv;
  double omega_ir_rad_s;
  double omega_uv_rad_s;
};

// Free-ion plasma contribution w_p^2/xi^2 added to a base model at xi > 0.
// plasma_freq_rad_s combines all ionic species: w^2 = sum_i n_i e^2/(eps0 m_i).
struct IonCorrection {
  double plasma_freq_rad_s = 0.0;
};

// Combined ionic plasma frequency for a fully dissociated 1:1 salt at number
// concentration c (mol/m^3) with the two ionic masses in atomic mass units.
IonCorrection ion_correction_for_salt(double concentration_mol_m3,
                                      double mass_cation_u,
                                      double mass_anion_u);

// Dielectric permittivity evaluated at imaginary frequency, eps(i xi).
// A value type; cheap to copy (internal state is shared and immutable), safe
// for concurrent evaluation from any number of threads.
class DielectricModel {
 public:
  static DielectricModel constant(double eps_rel);
  static DielectricModel drude(DrudeParams p);
  // Kramers-Kronig transform of Im[eps]: Drude below the crossover energy,
  // table above it, x^-3 extrapolation of Im[eps] past the last row.
  // crossover_ev must lie inside the table's energy range or below its minimum.
  static DielectricModel tabulated_with_drude_tail(OpticalDataTable table,
                                                   DrudeParams tail,
                                                   double crossover_ev);
  static DielectricModel oscillator(OscillatorModel m);
  static DielectricModel with_ions(DielectricModel base, IonCorrection ions);

  // eps(i xi) for xi > 0 (rad/s). Throws divergence_error for metallic
  // variants at xi = 0; the m=0 Lifshitz limit is handled by the force code,
  // never by evaluating a model there.
  double eval(double xi_rad_s) const;

  // Static permittivity, or nullopt when the model diverges at xi = 0
  // (Drude and Drude-tailed tables). The ion correction lives only at
  // xi > 0, so a WithIons model reports its base model's static value.
  std::optional<double> static_value() const;
  bool metallic_at_zero() const { return !static_value().has_value(); }

  std::string describe() const;

 private:
  struct Impl;
  explicit DielectricModel(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Standalone forms of the model evaluations (the class above wraps these).
double eps_drude(double xi_rad_s, const DrudeParams& p);
double eps_oscillator(double xi_rad_s, const OscillatorModel& m);
double eps_kramers_kronig(const OpticalDataTable& table, const DrudeParams& tail,
                          double crossover_ev, double xi_rad_s);
double eps_with_ions(double xi_rad_s, const DielectricModel& base,
                     const IonCorrection& ions);

// Matsubara frequencies xi_m = m * 2 pi k_B T / hbar for m = 0..m_max.
struct MatsubaraGrid {
  double temperature_k;
  std::vector<double> xi_rad_s;  // xi[0] = 0

  double spacing() const { return xi_rad_s[1]; }
};

MatsubaraGrid matsubara_grid(double temperature_k, int m_max);
double matsubara_spacing(double temperature_k);  // xi_1

}  // namespace caslif
