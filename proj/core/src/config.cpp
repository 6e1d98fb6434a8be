#include "fbac/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "fbac/errors.hpp"

namespace fbac {

namespace {

nlohmann::json from_toml(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = from_toml(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : *a) out.push_back(from_toml(v));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

bool compatible(const nlohmann::json& def, const nlohmann::json& val) {
  if (def.is_null()) return true;
  if (def.is_number_float()) return val.is_number();
  if (def.is_number_integer()) return val.is_number_integer();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) {
    if (!val.is_array()) return false;
    if (def.empty()) return true;
    for (const auto& e : val)
      if (!compatible(def.front(), e)) return false;
    return true;
  }
  if (def.is_object()) return val.is_object();
  return false;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  try {
    return from_toml(toml::parse(text));
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line "
        << e.source().begin.line;
    throw ConfigError(msg.str());
  }
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool is_toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (!is_toml) {
    try {
      nlohmann::json j = nlohmann::json::parse(text);
      if (!j.is_object()) throw ConfigError("config root must be an object");
      return j;
    } catch (const nlohmann::json::parse_error&) {
      // fall through to TOML
    }
  }
  return parse_toml(text);
}

nlohmann::json merge_config(const nlohmann::json& defaults,
                            const nlohmann::json& user,
                            const std::string& where) {
  if (!user.is_object())
    throw ConfigError("expected a table at '" + (where.empty() ? "<root>" : where) + "'");
  nlohmann::json out = defaults;
  for (const auto& [key, val] : user.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    const nlohmann::json& def = defaults.at(key);
    if (def.is_object()) {
      out[key] = merge_config(def, val, path);
    } else {
      if (!compatible(def, val))
        throw ConfigError("wrong type for config key '" + path + "'");
      out[key] = (def.is_number_float() && val.is_number_integer())
                     ? nlohmann::json(val.get<double>())
                     : val;
    }
  }
  return out;
}

std::string canonical_json(const nlohmann::json& j) { return j.dump(); }

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json(j)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_seed(const std::string& text) {
  std::string s = text;
  int base = 16;
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) {
    s = s.substr(2);
  } else if (s.rfind("0d", 0) == 0) {
    s = s.substr(2);
    base = 10;
  }
  if (s.empty()) throw ConfigError("empty seed");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &pos, base);
  } catch (const std::exception&) {
    throw ConfigError("invalid seed '" + text + "'");
  }
  if (pos != s.size()) throw ConfigError("invalid seed '" + text + "'");
  return v;
}

}  // namespace fbac
