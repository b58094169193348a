#include "config.hpp"

#include <fstream>
#include <sstream>

#include "caslif/constants.hpp"
#include "caslif/errors.hpp"
#include "caslif/io.hpp"
#include "caslif/parallel.hpp"

namespace cli {

using nlohmann::json;

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(path.string() + ": " + e.what());
  }
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required,
                  const std::string& context) {
  if (!obj.is_object()) throw config_error(context + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw config_error(context + ": unknown key '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!obj.count(key)) {
      throw config_error(context + ": missing key '" + key + "'");
    }
  }
}

double get_number(const json& obj, const std::string& key) {
  if (!obj.count(key) || !obj.at(key).is_number()) {
    throw config_error("expected numeric key '" + key + "'");
  }
  return obj.at(key).get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback) {
  if (!obj.count(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw config_error("expected numeric key '" + key + "'");
  }
  return obj.at(key).get<double>();
}

caslif::DielectricModel material_ref(const json& ref,
                                     const std::filesystem::path& base_dir,
                                     const std::string& context) {
  try {
    if (ref.is_string()) {
      std::filesystem::path p(ref.get<std::string>());
      if (p.is_relative()) p = base_dir / p;
      return caslif::read_material_file(p);
    }
    if (ref.is_object()) {
      return caslif::material_from_json_text(ref.dump(), base_dir);
    }
  } catch (const caslif::error& e) {
    throw config_error(context + ": " + e.what());
  }
  throw config_error(context + ": expected a material path or object");
}

caslif::LayerSystem system_from_json(const json& j,
                                     const std::filesystem::path& base_dir) {
  require_keys(j, {"sphere", "plate", "medium", "temperature_k", "radius_um"},
               {"sphere", "plate", "medium", "temperature_k", "radius_um"},
               "system");
  return caslif::LayerSystem{
      material_ref(j.at("sphere"), base_dir, "system.sphere"),
      material_ref(j.at("plate"), base_dir, "system.plate"),
      material_ref(j.at("medium"), base_dir, "system.medium"),
      get_number(j, "temperature_k"),
      get_number(j, "radius_um") * 1e-6};
}

caslif::StaticForceModel static_force_from_json(
    const json& j, const std::filesystem::path& base_dir, double radius_m,
    int threads) {
  if (!j.is_array()) {
    throw config_error("static_force: expected a component array");
  }
  caslif::StaticForceModel model = caslif::StaticForceModel::zero();
  for (const auto& comp : j) {
    if (!comp.is_object() || !comp.count("type")) {
      throw config_error("static_force component: missing 'type'");
    }
    const std::string type = comp.at("type").get<std::string>();
    if (type == "electrostatic") {
      require_keys(comp,
                   {"type", "v0_mv", "static_dielectric", "debye_length_nm"},
                   {"v0_mv", "static_dielectric", "debye_length_nm"},
                   "static_force(electrostatic)");
      model = model.plus(caslif::StaticForceModel::electrostatic(
          get_number(comp, "v0_mv") * 1e-3, radius_m,
          get_number(comp, "static_dielectric"),
          get_number(comp, "debye_length_nm") * 1e-9));
    } else if (type == "lifshitz") {
      require_keys(comp, {"type", "system", "table"}, {"system"},
                   "static_force(lifshitz)");
      const caslif::LayerSystem sys = system_from_json(comp.at("system"), base_dir);
      double lo = 5.0, hi = 3200.0;
      int points = 257;
      if (comp.count("table")) {
        const json& t = comp.at("table");
        require_keys(t, {"min_nm", "max_nm", "points"}, {}, "static_force.table");
        lo = get_number_or(t, "min_nm", lo);
        hi = get_number_or(t, "max_nm", hi);
        points = static_cast<int>(get_number_or(t, "points", points));
      }
      const auto grid = caslif::geometric_grid(lo * 1e-9, hi * 1e-9, points);
      std::vector<double> force(grid.size());
      caslif::parallel_for(grid.size(), threads, [&](std::size_t i) {
        force[i] = caslif::force_sphere_plate(sys, grid[i]);
      });
      model = model.plus(caslif::StaticForceModel::tabulated(
          caslif::ForceCurve::from_points(grid, force)));
    } else {
      throw config_error("static_force: unknown component type '" + type + "'");
    }
  }
  return model;
}

}  // namespace cli
