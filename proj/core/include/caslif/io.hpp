#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "caslif/dielectrics.hpp"
#include "caslif/fluid_forces.hpp"
#include "caslif/lifshitz.hpp"
#include "caslif/trace.hpp"

namespace caslif {

// Two-column text table `energy_eV  im_eps`, '#' comments, increasing energy.
OpticalDataTable read_optical_table(const std::filesystem::path& path);

// Material description as a JSON key/value tree naming the variant:
//   {"model":"constant","eps":...}
//   {"model":"drude","plasma_freq_ev":...,"relaxation_ev":...}
//   {"model":"tabulated_drude_tail","table_file":...,"plasma_freq_ev":...,
//    "relaxation_ev":...,"crossover_ev":...}
//   {"model":"oscillator","c_ir":...,"c_uv":...,"omega_ir_rad_s":...,
//    "omega_uv_rad_s":...}
//   {"model":"with_ions","base":{...},"ion_plasma_freq_rad_s":...} or
//   {"model":"with_ions","base":{...},"salt":{"concentration_mol_m3":...,
//    "mass_cation_u":...,"mass_anion_u":...}}
// Unknown keys are rejected. Relative table paths resolve against base_dir.
DielectricModel material_from_json_text(const std::string& json_text,
                                        const std::filesystem::path& base_dir);
DielectricModel read_material_file(const std::filesystem::path& path);

// Trace CSV: `# velocity_nm_s=...`, `# sample_rate_hz=...`, optional
// `# label=...`, a `d_piezo_nm,V_det_V` header row, then data rows.
DeflectionTrace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const std::filesystem::path& path, const DeflectionTrace& t);

// Roughness histogram: two-column text `fraction  displacement_nm`.
RoughnessDistribution read_roughness_histogram(const std::filesystem::path& path);

// Conductivity series: two-column text `molarity_M  conductivity_norm`.
ConductivitySeries read_conductivity_series(const std::filesystem::path& path);

// Plot-ready curve table: metadata header block (`# key = value`), a column
// header, then aligned numeric columns. Used for force curves and eps tables.
void write_table(const std::filesystem::path& path,
                 const std::vector<std::pair<std::string, std::string>>& metadata,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& data);

// All writes go through a write-temp-then-rename contract.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace caslif
