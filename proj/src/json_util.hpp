#pragma once

// Small helpers for schema checks that report a JSON pointer into the input.

#include <string>
#include <string_view>

#include <json.hpp>

#include "qkdnet/error.hpp"

namespace qkdnet::detail {

inline nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

inline void require_object(const nlohmann::json& doc, const std::string& path) {
  if (!doc.is_object()) throw InputError((path.empty() ? "/" : path) + ": expected an object");
}

inline const nlohmann::json& require_field(const nlohmann::json& obj, std::string_view field,
                                           const std::string& base) {
  std::string key(field.substr(1));
  if (!obj.contains(key)) throw InputError(base + std::string(field) + ": missing field");
  return obj[key];
}

inline std::string require_string(const nlohmann::json& obj, std::string_view field,
                                  const std::string& base = "") {
  const auto& v = require_field(obj, field, base);
  if (!v.is_string()) throw InputError(base + std::string(field) + ": expected a string");
  return v.get<std::string>();
}

inline double require_number(const nlohmann::json& obj, std::string_view field,
                             const std::string& base = "") {
  const auto& v = require_field(obj, field, base);
  if (!v.is_number()) throw InputError(base + std::string(field) + ": expected a number");
  return v.get<double>();
}

inline const nlohmann::json& require_array(const nlohmann::json& obj, std::string_view field,
                                           const std::string& base = "") {
  const auto& v = require_field(obj, field, base);
  if (!v.is_array()) throw InputError(base + std::string(field) + ": expected an array");
  return v;
}

/// Shortest decimal that round-trips; stable across runs.
std::string format_double(double value);

}  // namespace qkdnet::detail
