#pragma once

#include <cmath>

#include "equinav/vehicle.hpp"

namespace equinav {

constexpr double kGroundLookahead = 2.0;  // m
constexpr double kAirLookahead = 4.0;     // m
constexpr double kAirAltGain = 0.5;

struct ExpertCaptureError : EquinavError {
  using EquinavError::EquinavError;
};

// Pure pursuit on the track centerline. Steering is the yaw rate needed to
// reach the lookahead point, normalized by the platform's steering gain.
inline GroundAction expert_ground(const VehicleState& state,
                                  const Track& track) {
  const Polyline& center = track.centerline();
  const auto np = center.nearest(state.position);
  if (np.distance > 4.0 * track.lane_half_width)
    throw ExpertCaptureError("expert_ground: vehicle out of capture range");

  const Vec2 target = center.point_at(np.arclength + kGroundLookahead);
  const Vec2 to_target = target - state.position;
  const double dist = to_target.norm();
  if (dist < 1e-9) return GroundAction{0.0};
  const double alpha = bearing_from(state.yaw, to_target / dist);
  const double curvature = 2.0 * std::sin(alpha) / dist;
  const double yaw_rate = state.speed * curvature;
  return clip(GroundAction{yaw_rate / kSteerGain});
}

// Pure pursuit toward a lookahead point on the reference path; dz is
// proportional to the altitude error (z increases downward).
inline AirAction expert_air(const VehicleState& state,
                            const GateCourse& course) {
  const Polyline3& path = course.reference_path();
  const auto np = path.nearest(state.position3());
  if (np.distance > 10.0)
    throw ExpertCaptureError("expert_air: vehicle out of capture range");

  const Vec3 target = path.point_at(np.arclength + kAirLookahead);
  const Vec2 to_target(target.x() - state.position.x(),
                       target.y() - state.position.y());
  AirAction a;
  if (to_target.norm() > 1e-9)
    a.dyaw = bearing_from(state.yaw, to_target.normalized());
  a.dz = kAirAltGain * (target.z() - state.z);
  return clip(a);
}

// Start state on the centerline at a given arclength.
inline VehicleState start_state(const Track& track, double arclength,
                                double lateral_offset = 0.0,
                                double yaw_offset = 0.0) {
  const Polyline& center = track.centerline();
  VehicleState s;
  const double yaw = center.tangent_yaw_at(arclength);
  s.position = center.point_at(arclength) + lateral_offset * port_dir(yaw);
  s.yaw = wrap_angle(yaw + yaw_offset);
  s.speed = kGroundSpeed;
  return s;
}

inline VehicleState start_state(const GateCourse& course, double arclength) {
  const Polyline3& path = course.reference_path();
  const Vec3 p = path.point_at(arclength);
  const Vec3 q = path.point_at(arclength + 1.0);
  VehicleState s;
  s.position = Vec2(p.x(), p.y());
  s.z = p.z();
  s.yaw = std::atan2(q.y() - p.y(), q.x() - p.x());
  s.speed = kAirSpeed;
  return s;
}

}  // namespace equinav
