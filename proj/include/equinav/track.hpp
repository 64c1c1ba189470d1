#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "equinav/geometry.hpp"

namespace equinav {

// Closed-loop driving corridor. The dense centerline is derived from the
// waypoints by Catmull-Rom resampling and cached on first use.
struct Track {
  std::vector<Vec2> waypoints;
  double lane_half_width = 1.75;
  bool closed = true;
  std::uint64_t texture_seed = 0;

  const Polyline& centerline() const {
    if (!center_) {
      if (closed) {
        center_ = Polyline(catmull_rom_closed(waypoints, 8), true);
      } else {
        center_ = Polyline(waypoints, false);
      }
      left_edge_ = center_->offset(lane_half_width);
      right_edge_ = center_->offset(-lane_half_width);
    }
    return *center_;
  }
  const Polyline& left_edge() const {
    centerline();
    return *left_edge_;
  }
  const Polyline& right_edge() const {
    centerline();
    return *right_edge_;
  }

 private:
  mutable std::optional<Polyline> center_, left_edge_, right_edge_;
};

inline bool polyline_self_intersects(const Polyline& pl) {
  const auto& pts = pl.points();
  const std::size_t n = pl.n_segments();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1 && pl.closed()) continue;  // adjacent at wrap
      if (segments_intersect(pl.at(i), pl.at(i + 1), pl.at(j), pl.at(j + 1)))
        return true;
    }
  }
  return false;
}

inline bool corridor_self_intersects(const Track& t) {
  return polyline_self_intersects(t.left_edge()) ||
         polyline_self_intersects(t.right_edge());
}

// Perturbed-circle loop. Low-order harmonics keep local curvature within the
// vehicle's turning capability at the default corridor scale.
inline Track generate_track(std::uint64_t seed, int n_waypoints,
                            double curvature_scale,
                            double lane_half_width = 1.75) {
  require(n_waypoints >= 8, "generate_track: need n_waypoints >= 8");
  require(curvature_scale > 0.0, "generate_track: curvature_scale must be > 0");

  constexpr double kTargetSpacing = 8.0;  // m, mid-range of the [1,10] bound
  const double base_radius =
      kTargetSpacing * n_waypoints / (2.0 * std::numbers::pi);

  for (int attempt = 0; attempt < 16; ++attempt) {
    auto rng = make_rng(split_seed(seed, std::uint64_t(attempt) * 7919));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> amp(0.5, 1.0);
    const double a2 = amp(rng), p2 = phase(rng);
    const double a3 = amp(rng), p3 = phase(rng);

    Track t;
    t.texture_seed = split_seed(seed, 0x7e37);
    t.lane_half_width = lane_half_width;
    t.waypoints.reserve(n_waypoints);
    for (int i = 0; i < n_waypoints; ++i) {
      const double ang = 2.0 * std::numbers::pi * i / n_waypoints;
      const double wobble = a2 * std::sin(2.0 * ang + p2) / 2.0 +
                            a3 * std::sin(3.0 * ang + p3) / 3.0;
      const double r = base_radius * (1.0 + 0.18 * curvature_scale * wobble);
      t.waypoints.emplace_back(r * std::cos(ang), r * std::sin(ang));
    }

    bool spacing_ok = true;
    for (int i = 0; i < n_waypoints; ++i) {
      const double d =
          (t.waypoints[(i + 1) % n_waypoints] - t.waypoints[i]).norm();
      if (d < 1.0 || d > 10.0) spacing_ok = false;
    }
    if (spacing_ok && !corridor_self_intersects(t)) return t;
  }
  throw EquinavError("generate_track: no intersection-free track for seed " +
                     std::to_string(seed));
}

}  // namespace equinav
