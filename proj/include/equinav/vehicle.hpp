#pragma once

#include <cmath>
#include <variant>

#include "equinav/gates.hpp"
#include "equinav/geometry.hpp"
#include "equinav/track.hpp"

namespace equinav {

// Platform constants. All label-correction magnitudes are interpreted in
// these units.
// Steering is sensitive on purpose: typical lane-keeping commands use only a
// few percent of the range, so the fixed label-correction offsets (+-0.05)
// correspond to a physically meaningful recovery rate.
constexpr double kSteerGain = 2.5;  // rad/s yaw rate at full steering
constexpr double kDt = 0.1;          // s
constexpr double kGroundSpeed = 5.0; // m/s
constexpr double kAirSpeed = 3.0;    // m/s
constexpr double kMaxDyaw = 0.2;     // rad per step
constexpr double kMaxDz = 1.0;       // m per step

struct VehicleState {
  Vec2 position{0.0, 0.0};
  double yaw = 0.0;   // wrapped to (-pi, pi]
  double z = 0.0;     // air only; increases downward
  double speed = kGroundSpeed;
  double time = 0.0;

  Vec3 position3() const { return {position.x(), position.y(), z}; }
};

struct GroundAction {
  double steering = 0.0;  // normalized [-1, 1], positive turns starboard
};

struct AirAction {
  double dyaw = 0.0;  // rad per step, |dyaw| <= 0.2
  double dz = 0.0;    // m per step (down positive), |dz| <= 1
};

inline GroundAction clip(GroundAction a) {
  a.steering = std::clamp(a.steering, -1.0, 1.0);
  return a;
}

inline AirAction clip(AirAction a) {
  a.dyaw = std::clamp(a.dyaw, -kMaxDyaw, kMaxDyaw);
  a.dz = std::clamp(a.dz, -kMaxDz, kMaxDz);
  return a;
}

// Unicycle kinematics; steering maps to yaw rate through kSteerGain.
inline VehicleState step_ground(const VehicleState& s, GroundAction a,
                                double dt = kDt) {
  require(dt > 0.0, "step_ground: dt must be > 0");
  a = clip(a);
  VehicleState out = s;
  out.position += s.speed * dt * forward_dir(s.yaw);
  out.yaw = wrap_angle(s.yaw + kSteerGain * a.steering * dt);
  out.time = s.time + dt;
  return out;
}

// Forward-only flight while changing yaw and z.
inline VehicleState step_air(const VehicleState& s, AirAction a,
                             double dt = kDt) {
  require(dt > 0.0, "step_air: dt must be > 0");
  a = clip(a);
  VehicleState out = s;
  out.position += s.speed * dt * forward_dir(s.yaw);
  out.yaw = wrap_angle(s.yaw + a.dyaw);
  out.z = s.z + a.dz;
  out.time = s.time + dt;
  return out;
}

inline double cross_track_error(const VehicleState& s, const Track& track) {
  return track.centerline().nearest(s.position).distance;
}

inline double cross_track_error(const VehicleState& s,
                                const GateCourse& course) {
  return course.reference_path().nearest(s.position3()).distance;
}

}  // namespace equinav
