#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace trimfit::toml {

/// Minimal TOML subset: [tables], key = value, strings, integers, floats,
/// booleans, and single-line arrays of scalars. Enough for experiment specs.
struct Value {
  std::variant<std::string, std::int64_t, double, bool, std::vector<Value>> v;

  bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }
  const std::vector<Value>& as_array() const;
  std::string as_string() const;
  std::int64_t as_int() const;
  double as_double() const;  // accepts integer literals too
  bool as_bool() const;
};

using Table = std::map<std::string, Value>;
using Document = std::map<std::string, Table>;  // "" holds root-level keys

Document parse(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace trimfit::toml
