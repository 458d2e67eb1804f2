#pragma once

// Strict JSON config helpers for the wvsim CLI: unknown fields are rejected
// and every error names the offending field.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvsim/linalg.hpp"

namespace cli {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_in, const std::string& what)
      : std::runtime_error(what), field(std::move(field_in)) {}
};

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

inline void check_keys(const json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object at '" + path + "'");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(join_path(path, key), "unknown field '" + join_path(path, key) + "'");
}

inline const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key))
    throw ConfigError(join_path(path, key), "missing field '" + join_path(path, key) + "'");
  return obj.at(key);
}

inline double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "'" + path + "' must be a number");
  return v.get<double>();
}

inline std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ConfigError(path, "'" + path + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "'" + path + "' must be a string");
  return v.get<std::string>();
}

inline wvsim::Complex as_complex(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path, "'" + path + "' must be a [re, im] pair");
  return wvsim::Complex{v[0].get<double>(), v[1].get<double>()};
}

inline std::vector<wvsim::Complex> as_amplitudes(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty())
    throw ConfigError(path, "'" + path + "' must be a non-empty array of [re, im] pairs");
  std::vector<wvsim::Complex> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_complex(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline wvsim::Operator as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty())
    throw ConfigError(path, "'" + path + "' must be an array of rows");
  const std::size_t dim = v.size();
  wvsim::Operator m(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const json& row = v[r];
    if (!row.is_array() || row.size() != dim)
      throw ConfigError(path, "'" + path + "' must be square");
    for (std::size_t c = 0; c < dim; ++c)
      m.at(r, c) = as_complex(row[c], path + "[" + std::to_string(r) + "]");
  }
  if (!m.is_finite()) throw ConfigError(path, "'" + path + "' has non-finite entries");
  return m;
}

}  // namespace cli
