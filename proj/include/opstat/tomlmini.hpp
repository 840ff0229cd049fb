#pragma once

#include <string>

#include <json.hpp>

namespace opstat::app {

// Minimal TOML subset reader covering experiment configs: [table] and
// [table.sub] headers, bare keys, strings, booleans, integers, floats and
// single-line arrays of scalars, with # comments. Parses into a JSON object
// so config handling downstream is format-agnostic.
nlohmann::json parse_toml_text(const std::string& text);

// Loads .toml or .json by extension (default: TOML).
nlohmann::json load_config_file(const std::string& path);

}  // namespace opstat::app
