#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equinav/core.hpp"

namespace equinav {

// One line per artifact in <run dir>/manifest.jsonl: the relative file
// name, what kind of artifact it is, and the config hash it was produced
// under.
struct ManifestEntry {
  std::string file;
  std::string kind;  // "checkpoint", "dataset", "results", "plot", ...
  std::string config_hash;
};

inline void append_manifest(const std::filesystem::path& dir,
                            const ManifestEntry& e) {
  std::ofstream f(dir / "manifest.jsonl", std::ios::app);
  require(f.good(), "cannot open manifest in " + dir.string());
  nlohmann::json j{{"file", e.file}, {"kind", e.kind},
                   {"config_hash", e.config_hash}};
  f << j.dump() << "\n";
}

inline std::vector<ManifestEntry> read_manifest(
    const std::filesystem::path& dir) {
  std::vector<ManifestEntry> out;
  std::ifstream f(dir / "manifest.jsonl");
  if (!f.good()) return out;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw EquinavError("manifest line " + std::to_string(lineno) +
                         " is not valid JSON");
    }
    require(j.contains("file") && j.contains("kind"),
            "manifest line " + std::to_string(lineno) + " is missing fields");
    out.push_back({j["file"].get<std::string>(), j["kind"].get<std::string>(),
                   j.value("config_hash", "")});
  }
  return out;
}

// Every referenced artifact must exist; the error names the missing file.
inline void validate_manifest(const std::filesystem::path& dir) {
  for (const auto& e : read_manifest(dir))
    require(std::filesystem::exists(dir / e.file),
            "manifest references missing file: " + e.file);
}

inline bool manifest_has(const std::filesystem::path& dir,
                         const std::string& file) {
  for (const auto& e : read_manifest(dir))
    if (e.file == file && std::filesystem::exists(dir / e.file)) return true;
  return false;
}

}  // namespace equinav
