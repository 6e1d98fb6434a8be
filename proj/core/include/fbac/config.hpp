#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace fbac {

/// Reads a TOML file (".toml", or any file that does not parse as JSON) or a
/// JSON file into a JSON tree. Throws ConfigError on I/O or syntax errors.
nlohmann::json load_config_file(const std::string& path);

nlohmann::json parse_toml(const std::string& text);

/// Overlays `user` on `defaults`. Keys missing from `defaults` and values of
/// the wrong type are errors; a null default accepts anything.
nlohmann::json merge_config(const nlohmann::json& defaults,
                            const nlohmann::json& user,
                            const std::string& where = "");

/// Sorted-key compact serialisation.
std::string canonical_json(const nlohmann::json& j);

/// FNV-1a 64 of canonical_json, as 16 lowercase hex digits.
std::string config_hash(const nlohmann::json& j);

/// Accepts "0x5EED", "5eed" or decimal digits prefixed by "0d".
std::uint64_t parse_seed(const std::string& text);

}  // namespace fbac
