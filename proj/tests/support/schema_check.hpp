#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace rcook::test {

// Minimal JSON-schema checker covering the subset the shipped schemas use:
// type (single or list), enum, required, properties, items, minimum,
// maximum, minItems.
inline void schema_check(const nlohmann::json& schema,
                         const nlohmann::json& value, const std::string& where,
                         std::vector<std::string>& errors) {
  using nlohmann::json;

  auto type_matches = [&](const std::string& t) {
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "string") return value.is_string();
    if (t == "boolean") return value.is_boolean();
    if (t == "null") return value.is_null();
    if (t == "integer") return value.is_number_integer();
    if (t == "number") return value.is_number();
    return false;
  };

  if (schema.contains("type")) {
    const auto& ty = schema.at("type");
    bool ok = false;
    if (ty.is_string()) {
      ok = type_matches(ty.get<std::string>());
    } else {
      for (const auto& t : ty)
        if (type_matches(t.get<std::string>())) ok = true;
    }
    if (!ok) {
      errors.push_back(where + ": type mismatch, expected " + ty.dump() +
                       ", got " + value.dump());
      return;
    }
  }

  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& candidate : schema.at("enum"))
      if (candidate == value) ok = true;
    if (!ok)
      errors.push_back(where + ": " + value.dump() + " not in enum " +
                       schema.at("enum").dump());
  }

  if (value.is_number() && schema.contains("minimum") &&
      value.get<double>() < schema.at("minimum").get<double>())
    errors.push_back(where + ": " + value.dump() + " below minimum");
  if (value.is_number() && schema.contains("maximum") &&
      value.get<double>() > schema.at("maximum").get<double>())
    errors.push_back(where + ": " + value.dump() + " above maximum");

  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema.at("required"))
        if (!value.contains(key.get<std::string>()))
          errors.push_back(where + ": missing required key " + key.dump());
    if (schema.contains("properties"))
      for (const auto& [key, sub] : schema.at("properties").items())
        if (value.contains(key))
          schema_check(sub, value.at(key), where + "/" + key, errors);
  }

  if (value.is_array()) {
    if (schema.contains("minItems") &&
        value.size() < schema.at("minItems").get<size_t>())
      errors.push_back(where + ": fewer than minItems elements");
    if (schema.contains("items")) {
      size_t i = 0;
      for (const auto& el : value)
        schema_check(schema.at("items"), el,
                     where + "/" + std::to_string(i++), errors);
    }
  }
}

inline std::vector<std::string> schema_errors(const nlohmann::json& schema,
                                              const nlohmann::json& value) {
  std::vector<std::string> errors;
  schema_check(schema, value, "$", errors);
  return errors;
}

}  // namespace rcook::test
