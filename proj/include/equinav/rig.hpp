#pragma once

#include <string>
#include <vector>

#include "equinav/core.hpp"

namespace equinav {

enum class Platform { kGroundSim, kFlying, kHuskyProfile };

inline std::string to_string(Platform p) {
  switch (p) {
    case Platform::kGroundSim: return "ground-sim";
    case Platform::kFlying: return "flying";
    case Platform::kHuskyProfile: return "husky-profile";
  }
  return "?";
}

inline Platform platform_from_string(const std::string& s) {
  if (s == "ground-sim") return Platform::kGroundSim;
  if (s == "flying") return Platform::kFlying;
  if (s == "husky-profile") return Platform::kHuskyProfile;
  throw EquinavError("unknown platform: " + s);
}

// Lateral offsets are along the port side of the heading; vertical offsets
// are up. "left" therefore sits where a positive (starboard) steering
// correction recovers toward the path.
struct ViewpointOffset {
  std::string id;
  double lateral = 0.0;   // m, port positive
  double vertical = 0.0;  // m, up positive
};

struct CameraRig {
  Platform platform = Platform::kGroundSim;
  std::vector<ViewpointOffset> offsets;  // center first
  int image_width = 64;
  int image_height = 48;

  std::size_t n_viewpoints() const { return offsets.size(); }

  const ViewpointOffset& viewpoint(const std::string& id) const {
    for (const auto& o : offsets)
      if (o.id == id) return o;
    throw EquinavError("unknown viewpoint: " + id);
  }
};

// Three cameras, each 25 cm apart.
inline CameraRig ground_rig(int w = 64, int h = 48) {
  CameraRig rig;
  rig.platform = Platform::kGroundSim;
  rig.image_width = w;
  rig.image_height = h;
  rig.offsets = {{"center", 0.0, 0.0}, {"left", 0.25, 0.0},
                 {"right", -0.25, 0.0}};
  return rig;
}

// Five cameras, 50 cm each from the center camera.
inline CameraRig flying_rig(int w = 64, int h = 48) {
  CameraRig rig;
  rig.platform = Platform::kFlying;
  rig.image_width = w;
  rig.image_height = h;
  rig.offsets = {{"center", 0.0, 0.0}, {"left", 0.5, 0.0},
                 {"right", -0.5, 0.0}, {"top", 0.0, 0.5},
                 {"bottom", 0.0, -0.5}};
  return rig;
}

inline CameraRig husky_rig(int w = 64, int h = 48) {
  CameraRig rig = ground_rig(w, h);
  rig.platform = Platform::kHuskyProfile;
  return rig;
}

inline CameraRig rig_for(Platform p, int w = 64, int h = 48) {
  switch (p) {
    case Platform::kGroundSim: return ground_rig(w, h);
    case Platform::kFlying: return flying_rig(w, h);
    case Platform::kHuskyProfile: return husky_rig(w, h);
  }
  throw EquinavError("bad platform");
}

}  // namespace equinav
