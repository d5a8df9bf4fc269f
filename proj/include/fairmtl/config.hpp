#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmtl/features.hpp"

namespace fairmtl {

// Raised for anything the user can fix by editing the config or command
// line; the CLI maps it to exit code 2 (runtime failures exit with 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value run configuration. The file format is one `key = value`
// per line, full-line or trailing `#` comments, no sections. Values keep
// their literal text until a typed getter parses them, so the config hash
// covers exactly what the user wrote.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Config cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = strip_comment(line);
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected `key = value`");
      }
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
      }
      if (!cfg.values_.emplace(key, value).second) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": duplicate key \"" + key + "\"");
      }
    }
    return cfg;
  }

  // --set key=value from the command line; later overrides win.
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got \"" + assignment + "\"");
    }
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key \"" + key + "\"");
    return it->second;
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? parse_u64(key, values_.at(key)) : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key, values_.at(key)) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key \"" + key + "\": expected boolean, got \"" + v + "\"");
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

  // FNV-1a over the canonical `key=value\n` serialization (keys sorted by
  // the map); recorded in models and reports for provenance.
  std::string hash() const {
    std::string canon;
    for (const auto& [k, v] : values_) {
      canon += k;
      canon += '=';
      canon += v;
      canon += '\n';
    }
    const std::uint64_t h = fnv1a64(canon);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
  }

  static std::string strip_comment(const std::string& s) {
    const auto hash_pos = s.find('#');
    return trim(hash_pos == std::string::npos ? s : s.substr(0, hash_pos));
  }

  static std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
      const unsigned long long out = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing junk");
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\": expected non-negative integer, got \"" + v + "\"");
    }
  }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing junk");
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key \"" + key + "\": expected number, got \"" + v + "\"");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace fairmtl
