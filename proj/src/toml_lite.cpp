#include "trimfit/toml_lite.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace trimfit::toml {

const std::vector<Value>& Value::as_array() const {
  if (auto* a = std::get_if<std::vector<Value>>(&v)) return *a;
  throw std::runtime_error("toml: value is not an array");
}

std::string Value::as_string() const {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw std::runtime_error("toml: value is not a string");
}

std::int64_t Value::as_int() const {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw std::runtime_error("toml: value is not an integer");
}

double Value::as_double() const {
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::runtime_error("toml: value is not a number");
}

bool Value::as_bool() const {
  if (auto* b = std::get_if<bool>(&v)) return *b;
  throw std::runtime_error("toml: value is not a boolean");
}

namespace {

std::string strip(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

Value parse_scalar(const std::string& raw, int line_no) {
  std::string s = strip(raw);
  if (s.empty()) throw std::runtime_error("toml: empty value on line " + std::to_string(line_no));
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw std::runtime_error("toml: unterminated string on line " + std::to_string(line_no));
    return Value{s.substr(1, s.size() - 2)};
  }
  if (s == "true") return Value{true};
  if (s == "false") return Value{false};
  if (s.find_first_of(".eE") == std::string::npos) {
    std::int64_t i;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ec == std::errc() && p == s.data() + s.size()) return Value{i};
  }
  double d;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && p == s.data() + s.size()) return Value{d};
  throw std::runtime_error("toml: cannot parse value '" + s + "' on line " +
                           std::to_string(line_no));
}

Value parse_value(const std::string& raw, int line_no) {
  std::string s = strip(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      throw std::runtime_error("toml: unterminated array on line " + std::to_string(line_no));
    std::vector<Value> items;
    std::string body = s.substr(1, s.size() - 2);
    std::string cell;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!strip(cell).empty()) items.push_back(parse_scalar(cell, line_no));
        cell.clear();
      } else {
        cell += c;
      }
    }
    if (!strip(cell).empty()) items.push_back(parse_scalar(cell, line_no));
    return Value{std::move(items)};
  }
  return parse_scalar(s, line_no);
}

}  // namespace

Document parse(const std::string& text) {
  Document doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = strip(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw std::runtime_error("toml: malformed table header on line " +
                                 std::to_string(line_no));
      section = strip(s.substr(1, s.size() - 2));
      doc[section];
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("toml: expected key = value on line " + std::to_string(line_no));
    std::string key = strip(s.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("toml: empty key on line " + std::to_string(line_no));
    doc[section][key] = parse_value(s.substr(eq + 1), line_no);
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("toml: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace trimfit::toml
