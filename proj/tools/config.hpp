#pragma once

#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "caslif/dielectrics.hpp"
#include "caslif/lifshitz.hpp"
#include "caslif/synth.hpp"

namespace cli {

// Configuration problems exit with a distinct code from data problems.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json load_config(const std::filesystem::path& path);

// Rejects unknown keys and reports missing required ones.
void require_keys(const nlohmann::json& obj, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& context);

double get_number(const nlohmann::json& obj, const std::string& key);
double get_number_or(const nlohmann::json& obj, const std::string& key,
                     double fallback);

// Material reference: either a path (relative to base_dir) or an inline
// material object.
caslif::DielectricModel material_ref(const nlohmann::json& ref,
                                     const std::filesystem::path& base_dir,
                                     const std::string& context);

// {"sphere":…, "plate":…, "medium":…, "temperature_k":…, "radius_um":…}
caslif::LayerSystem system_from_json(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir);

// Static-force component list for the trace generator ("lifshitz",
// "electrostatic", or an empty list for zero force).
caslif::StaticForceModel static_force_from_json(
    const nlohmann::json& j, const std::filesystem::path& base_dir,
    double radius_m, int threads);

}  // namespace cli
