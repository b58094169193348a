#include "caslif/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "caslif/errors.hpp"

namespace caslif {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// two numeric columns, '#' comments
std::vector<std::pair<double, double>> read_two_columns(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("cannot open file: " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_comment_or_blank(line)) continue;
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected two numeric columns";
      throw invalid_input_error(msg.str());
    }
    rows.emplace_back(a, b);
  }
  return rows;
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required,
                  const std::string& context) {
  if (!obj.is_object()) {
    throw invalid_input_error(context + ": expected a JSON object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw invalid_input_error(context + ": unknown key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!obj.count(key)) {
      throw invalid_input_error(context + ": missing key '" + key + "'");
    }
  }
}

DielectricModel material_from_json(const json& j,
                                   const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.count("model")) {
    throw invalid_input_error("material: missing 'model' key");
  }
  const std::string model = j.at("model").get<std::string>();
  if (model == "constant") {
    require_keys(j, {"model", "eps"}, {"eps"}, "material(constant)");
    return DielectricModel::constant(j.at("eps").get<double>());
  }
  if (model == "drude") {
    require_keys(j, {"model", "plasma_freq_ev", "relaxation_ev"},
                 {"plasma_freq_ev", "relaxation_ev"}, "material(drude)");
    return DielectricModel::drude({j.at("plasma_freq_ev").get<double>(),
                                   j.at("relaxation_ev").get<double>()});
  }
  if (model == "tabulated_drude_tail") {
    require_keys(j,
                 {"model", "table_file", "plasma_freq_ev", "relaxation_ev",
                  "crossover_ev"},
                 {"table_file", "plasma_freq_ev", "relaxation_ev", "crossover_ev"},
                 "material(tabulated_drude_tail)");
    std::filesystem::path table(j.at("table_file").get<std::string>());
    if (table.is_relative()) table = base_dir / table;
    return DielectricModel::tabulated_with_drude_tail(
        read_optical_table(table),
        {j.at("plasma_freq_ev").get<double>(), j.at("relaxation_ev").get<double>()},
        j.at("crossover_ev").get<double>());
  }
  if (model == "oscillator") {
    require_keys(
        j, {"model", "c_ir", "c_uv", "omega_ir_rad_s", "omega_uv_rad_s"},
        {"c_ir", "c_uv", "omega_ir_rad_s", "omega_uv_rad_s"},
        "material(oscillator)");
    return DielectricModel::oscillator({j.at("c_ir").get<double>(),
                                        j.at("c_uv").get<double>(),
                                        j.at("omega_ir_rad_s").get<double>(),
                                        j.at("omega_uv_rad_s").get<double>()});
  }
  if (model == "with_ions") {
    require_keys(j, {"model", "base", "ion_plasma_freq_rad_s", "salt"}, {"base"},
                 "material(with_ions)");
    const DielectricModel base = material_from_json(j.at("base"), base_dir);
    if (j.count("salt")) {
      const json& s = j.at("salt");
      require_keys(s, {"concentration_mol_m3", "mass_cation_u", "mass_anion_u"},
                   {"concentration_mol_m3", "mass_cation_u", "mass_anion_u"},
                   "material(with_ions).salt");
      return DielectricModel::with_ions(
          base, ion_correction_for_salt(s.at("concentration_mol_m3").get<double>(),
                                        s.at("mass_cation_u").get<double>(),
                                        s.at("mass_anion_u").get<double>()));
    }
    if (!j.count("ion_plasma_freq_rad_s")) {
      throw invalid_input_error(
          "material(with_ions): needs 'salt' or 'ion_plasma_freq_rad_s'");
    }
    return DielectricModel::with_ions(
        base, IonCorrection{j.at("ion_plasma_freq_rad_s").get<double>()});
  }
  throw invalid_input_error("material: unknown model '" + model + "'");
}

}  // namespace

OpticalDataTable read_optical_table(const std::filesystem::path& path) {
  const auto cols = read_two_columns(path);
  std::vector<OpticalDataTable::Row> rows;
  rows.reserve(cols.size());
  for (const auto& [e, im] : cols) rows.push_back({e, im});
  try {
    return OpticalDataTable::from_rows(std::move(rows));
  } catch (const invalid_input_error& e) {
    throw invalid_input_error(path.string() + ": " + e.what());
  }
}

DielectricModel material_from_json_text(const std::string& json_text,
                                        const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw invalid_input_error(std::string("material JSON parse error: ") + e.what());
  }
  return material_from_json(j, base_dir);
}

DielectricModel read_material_file(const std::filesystem::path& path) {
  try {
    return material_from_json_text(read_file(path), path.parent_path());
  } catch (const invalid_input_error& e) {
    throw invalid_input_error(path.string() + ": " + e.what());
  }
}

DeflectionTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("cannot open file: " + path.string());
  std::string line;
  std::size_t lineno = 0;
  double velocity = 0.0, rate = 0.0;
  bool have_velocity = false, have_rate = false;
  std::string label;
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
          while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.erase(s.begin());
          while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.pop_back();
        };
        trim(key);
        trim(value);
        if (key == "velocity_nm_s") {
          velocity = std::stod(value);
          have_velocity = true;
        } else if (key == "sample_rate_hz") {
          rate = std::stod(value);
          have_rate = true;
        } else if (key == "label") {
          label = value;
        }
      }
      continue;
    }
    if (line.find("d_piezo_nm") != std::string::npos) continue;  // column header
    std::istringstream ls(line);
    std::string xa, xb;
    if (!std::getline(ls, xa, ',') || !std::getline(ls, xb)) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected 'd_piezo_nm,V_det_V'";
      throw invalid_input_error(msg.str());
    }
    xs.push_back(std::stod(xa));
    vs.push_back(std::stod(xb));
  }
  if (!have_velocity || !have_rate) {
    throw invalid_input_error(path.string() +
                              ": missing '# velocity_nm_s=' or '# sample_rate_hz=' header");
  }
  try {
    return DeflectionTrace::from_samples(std::move(xs), std::move(vs), velocity,
                                         rate, label.empty() ? path.stem().string()
                                                             : label);
  } catch (const invalid_input_error& e) {
    throw invalid_input_error(path.string() + ": " + e.what());
  }
}

void write_trace_csv(const std::filesystem::path& path, const DeflectionTrace& t) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", t.velocity_nm_s);
  out << "# velocity_nm_s=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.6f", t.sample_rate_hz);
  out << "# sample_rate_hz=" << buf << "\n";
  if (!t.label.empty()) out << "# label=" << t.label << "\n";
  out << "d_piezo_nm,V_det_V\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.4f,%.9e", t.piezo_nm[i], t.detector_v[i]);
    out << buf << "\n";
  }
  atomic_write_text(path, out.str());
}

RoughnessDistribution read_roughness_histogram(const std::filesystem::path& path) {
  const auto cols = read_two_columns(path);
  std::vector<RoughnessDistribution::Bin> bins;
  bins.reserve(cols.size());
  for (const auto& [fraction, delta_nm] : cols) {
    bins.push_back({fraction, delta_nm * 1e-9});
  }
  try {
    return RoughnessDistribution::from_bins(std::move(bins));
  } catch (const invalid_input_error& e) {
    throw invalid_input_error(path.string() + ": " + e.what());
  }
}

ConductivitySeries read_conductivity_series(const std::filesystem::path& path) {
  const auto cols = read_two_columns(path);
  std::vector<ConductivitySeries::Point> pts;
  pts.reserve(cols.size());
  for (const auto& [m, c] : cols) pts.push_back({m, c});
  try {
    return ConductivitySeries::from_points(std::move(pts));
  } catch (const error& e) {
    throw invalid_input_error(path.string() + ": " + e.what());
  }
}

void write_table(const std::filesystem::path& path,
                 const std::vector<std::pair<std::string, std::string>>& metadata,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& data) {
  if (data.size() != columns.size()) {
    throw invalid_input_error("table writer: column/name count mismatch");
  }
  for (const auto& col : data) {
    if (col.size() != data.front().size()) {
      throw invalid_input_error("table writer: ragged columns");
    }
  }
  std::ostringstream out;
  for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << "\n";
  out << "#";
  for (const auto& name : columns) out << " " << name;
  out << "\n";
  char buf[64];
  for (std::size_t row = 0; row < data.front().size(); ++row) {
    for (std::size_t c = 0; c < data.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", data[c][row]);
      out << (c ? "  " : "") << buf;
    }
    out << "\n";
  }
  atomic_write_text(path, out.str());
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input_error("cannot write file: " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw invalid_input_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw invalid_input_error("atomic rename failed for " + path.string() + ": " +
                              ec.message());
  }
}

}  // namespace caslif
