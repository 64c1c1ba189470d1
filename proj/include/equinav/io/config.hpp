#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "equinav/core.hpp"

namespace equinav {

// Flat key=value configuration with optional [section] headers; keys inside
// a section are addressed as "section.key". '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace config_detail

inline ConfigMap parse_config_text(const std::string& text) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']',
              "config line " + std::to_string(lineno) + ": unclosed section");
      section = config_detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = config_detail::trim(line.substr(0, eq));
    require(!key.empty(),
            "config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    require(!cfg.count(key), "config: duplicate key " + key);
    cfg[key] = config_detail::trim(line.substr(eq + 1));
  }
  return cfg;
}

inline ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open config: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

// Unknown keys are a hard error, so typos never silently fall back to
// defaults.
inline void validate_keys(const ConfigMap& cfg,
                          const std::set<std::string>& known) {
  for (const auto& [k, v] : cfg)
    require(known.count(k) > 0, "config: unknown key " + k);
}

// Stable hash of the canonical key=value form (map order is sorted).
inline std::uint64_t config_hash(const ConfigMap& cfg) {
  std::string canonical;
  for (const auto& [k, v] : cfg) {
    canonical += k;
    canonical += '=';
    canonical += v;
    canonical += '\n';
  }
  return fnv1a(canonical);
}

inline double config_double(const ConfigMap& cfg, const std::string& key,
                            double fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    require(pos == it->second.size(), "");
    return v;
  } catch (...) {
    throw EquinavError("config: " + key + " is not a number: " + it->second);
  }
}

inline long config_int(const ConfigMap& cfg, const std::string& key,
                       long fallback) {
  auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    require(pos == it->second.size(), "");
    return v;
  } catch (...) {
    throw EquinavError("config: " + key +
                       " is not an integer: " + it->second);
  }
}

inline std::string config_str(const ConfigMap& cfg, const std::string& key,
                              const std::string& fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second;
}

}  // namespace equinav
