#pragma once

namespace caslif {

// CODATA 2018 values, SI. Fixed in one place; everything else derives from these.
namespace constants {
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double c_light = 299792458.0;           // m/s
inline constexpr double eps0 = 8.8541878128e-12;         // F/m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double avogadro = 6.02214076e23;        // 1/mol
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg
}  // namespace constants

// Photon energy in eV <-> angular frequency in rad/s. All internal frequencies
// are rad/s; eV appears only at input boundaries and is converted once.
inline constexpr double rad_s_per_ev =
    constants::elementary_charge / constants::hbar;  // 1.51927e15

inline constexpr double ev_to_rad_s(double ev) { return ev * rad_s_per_ev; }
inline constexpr double rad_s_to_ev(double w) { return w / rad_s_per_ev; }

// Unit helpers for the nm/pN boundary convention.
inline constexpr double nm_to_m(double nm) { return nm * 1e-9; }
inline constexpr double m_to_nm(double m) { return m * 1e9; }
inline constexpr double pn_to_n(double pn) { return pn * 1e-12; }
inline constexpr double n_to_pn(double n) { return n * 1e12; }

}  // namespace caslif
