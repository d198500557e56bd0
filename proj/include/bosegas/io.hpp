#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bosegas/errors.hpp"

namespace bosegas {

inline constexpr const char* tool_version = "0.1.0";

using json = nlohmann::json;

/// %.17g, with non-finite values spelled as JSON null / CSV nan.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) { os << json(s).dump(); }

inline void write_json(std::ostream& os, const json& j, int indent, int level) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * level), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // keys are sorted
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_string(os, it.key());
        os << colon;
        write_json(os, it.value(), indent, level + 1);
      }
      os << nl << close << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ',' << nl;
        os << pad;
        write_json(os, j[i], indent, level + 1);
      }
      os << nl << close << ']';
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      os << (std::isfinite(v) ? format_double(v) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes with sorted keys and 17 significant digits, so equal values
/// always give equal bytes. indent = 0 gives the compact canonical form.
inline std::string to_text(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  if (indent > 0) os << '\n';
  return os.str();
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const json& effective) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(effective, 0)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config-parse", "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config-parse", path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write " + path);
  out << text;
}

/// Typed access to one JSON object that remembers which keys were used, so
/// that misspelled keys are reported instead of silently ignored.
class ConfigReader {
 public:
  ConfigReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError("config-type", where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    return as_number(j_.at(key), key);
  }

  double number(const std::string& key) {
    require(key);
    return number(key, 0.0);
  }

  int integer(const std::string& key, int fallback) {
    if (!take(key)) return fallback;
    const double v = as_number(j_.at(key), key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config-type", path(key) + " must be an integer");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ConfigError("config-type", path(key) + " must be true or false");
    return j_.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    if (!j_.at(key).is_string()) throw ConfigError("config-type", path(key) + " must be a string");
    return j_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!take(key)) return fallback;
    const auto& a = j_.at(key);
    if (a.is_number()) return {as_number(a, key)};
    if (!a.is_array()) throw ConfigError("config-type", path(key) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& v : a) out.push_back(as_number(v, key));
    return out;
  }

  /// Nested object; an absent key yields an empty object.
  ConfigReader object(const std::string& key) {
    if (!take(key)) return ConfigReader(empty(), path(key));
    return ConfigReader(j_.at(key), path(key));
  }

  /// Throws on any key that was never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown-key", "unknown key " + path(it.key()));
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }
  bool take(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }
  void require(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing-key", "missing required key " + path(key));
  }
  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) throw ConfigError("config-type", path(key) + " must be a number");
    return v.get<double>();
  }
  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

}  // namespace bosegas
