#pragma once

#include <string>
#include <string_view>

#include "explorer/error.hpp"
#include "json.hpp"

namespace explorer::detail {

inline nlohmann::json parse(std::string_view text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Schema, what + ": malformed JSON (" + e.what() + ")", what);
  }
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key,
                                     const std::string& field) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::Schema, field + ": missing '" + key + "'", field + "." + key);
  }
  return j.at(key);
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& field) {
  const auto& v = require(j, key, field);
  if (!v.is_string()) {
    throw Error(ErrorKind::Schema, field + "." + key + ": expected a string", field + "." + key);
  }
  return v.get<std::string>();
}

inline double require_number(const nlohmann::json& j, const char* key, const std::string& field) {
  const auto& v = require(j, key, field);
  if (!v.is_number()) {
    throw Error(ErrorKind::Schema, field + "." + key + ": expected a number", field + "." + key);
  }
  return v.get<double>();
}

}  // namespace explorer::detail
