#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "equinav/augment/dataset.hpp"
#include "equinav/io/manifest.hpp"

namespace equinav {

// On-disk dataset layout: one PGM per camera image plus samples.jsonl. The
// first line carries dataset-level metadata; every following line is one
// sample with its action, state, and image file names.
inline void save_dataset(const std::filesystem::path& dir, const Dataset& ds,
                         const std::string& world_id) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = dir / "samples.jsonl.tmp";
  std::ofstream f(tmp);
  require(f.good(), "cannot open for write: " + tmp.string());
  nlohmann::json meta{{"meta", true},
                      {"platform", to_string(ds.rig.platform)},
                      {"world_id", world_id},
                      {"samples", ds.samples.size()}};
  f << meta.dump() << "\n";
  char name[64];
  for (const auto& s : ds.samples) {
    nlohmann::json images = nlohmann::json::object();
    for (std::size_t v = 0; v < ds.rig.offsets.size(); ++v) {
      const Image& img = s.images.at(v);
      if (img.width == 0) continue;  // camera not recorded
      std::snprintf(name, sizeof(name), "e%03d_s%04d_%s.pgm", s.episode,
                    s.step, ds.rig.offsets[v].id.c_str());
      write_pgm(img, dir / name);
      images[ds.rig.offsets[v].id] = name;
    }
    nlohmann::json j{{"episode", s.episode},
                     {"step", s.step},
                     {"action", s.action},
                     {"state",
                      {{"x", s.state.position.x()},
                       {"y", s.state.position.y()},
                       {"z", s.state.z},
                       {"yaw", s.state.yaw},
                       {"speed", s.state.speed},
                       {"time", s.state.time}}},
                     {"images", images}};
    f << j.dump() << "\n";
  }
  require(f.good(), "dataset write failed in " + dir.string());
  f.close();
  std::filesystem::rename(tmp, dir / "samples.jsonl");
}

struct LoadedDataset {
  Dataset data;
  std::string world_id;
};

inline LoadedDataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream f(dir / "samples.jsonl");
  require(f.good(), "cannot open dataset: " + (dir / "samples.jsonl").string());
  std::string line;
  require(bool(std::getline(f, line)), "empty dataset manifest");
  const nlohmann::json meta = nlohmann::json::parse(line);
  require(meta.value("meta", false), "dataset manifest missing meta line");
  LoadedDataset out;
  out.world_id = meta.value("world_id", "");
  out.data.rig = rig_for(platform_from_string(meta["platform"]));
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    Sample s;
    s.episode = j["episode"].get<int>();
    s.step = j["step"].get<int>();
    s.action = j["action"].get<std::vector<double>>();
    const auto& st = j["state"];
    s.state.position = {st["x"].get<double>(), st["y"].get<double>()};
    s.state.z = st["z"].get<double>();
    s.state.yaw = st["yaw"].get<double>();
    s.state.speed = st["speed"].get<double>();
    s.state.time = st["time"].get<double>();
    s.images.resize(out.data.rig.offsets.size());
    for (std::size_t v = 0; v < out.data.rig.offsets.size(); ++v) {
      const std::string& id = out.data.rig.offsets[v].id;
      if (j["images"].contains(id))
        s.images[v] = read_pgm(dir / j["images"][id].get<std::string>());
    }
    out.data.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace equinav
