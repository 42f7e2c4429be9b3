#pragma once

#include "qnf/model.hpp"

#include "json.hpp"

#include <string>

namespace qnf {

// zeros/poles serialized as [re, im] pairs; "unit" is "rad_s" or "hz" and is
// mandatory on input. k is the dimensionless gain factor and never rescaled.
nlohmann::json zpk_to_json(const zpk& model, const std::string& unit);
zpk zpk_from_json(const nlohmann::json& j);
zpk load_zpk(const std::string& path);

// Missing config keys fall back to the reference scenario (losses default 0);
// unknown keys are rejected.
nlohmann::json config_to_json(const interferometer_config& config);
interferometer_config config_from_json(const nlohmann::json& j);
interferometer_config load_config(const std::string& path);

} // namespace qnf
