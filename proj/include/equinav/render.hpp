#pragma once

#include <algorithm>
#include <cmath>
#include <variant>
#include <vector>

#include "equinav/gates.hpp"
#include "equinav/image.hpp"
#include "equinav/rig.hpp"
#include "equinav/track.hpp"
#include "equinav/vehicle.hpp"

namespace equinav {

using World = std::variant<Track, GateCourse>;

namespace render_detail {

constexpr double kFovRad = 1.6;
constexpr double kCamHeight = 1.2;   // ground camera above road surface
constexpr double kWallHeight = 1.6;  // lane-edge wall

inline double focal(int width) {
  return (width / 2.0) / std::tan(kFovRad / 2.0);
}

// [0,1) texture band per 2 m of wall arclength.
inline double band(double arclength, std::uint64_t seed, int side) {
  const std::int64_t cell = std::int64_t(std::floor(arclength / 2.0));
  std::uint64_t h = fnv1a(&cell, sizeof(cell), seed ^ std::uint64_t(side));
  return double(h % 1000) / 1000.0;
}

struct RayHit {
  double depth = std::numeric_limits<double>::infinity();  // forward depth
  double arclength = 0.0;
  int side = 0;  // 0 = left edge, 1 = right edge
};

// Smallest positive forward-depth hit of ray cam + t*(axis + u*star) against
// a wall polyline; the along-axis component of the direction is 1, so t is
// forward depth directly.
inline void cast(const Vec2& cam, const Vec2& axis, const Vec2& star, double u,
                 const Polyline& wall, int side, RayHit& best) {
  const Vec2 r = axis + u * star;
  for (std::size_t i = 0; i < wall.n_segments(); ++i) {
    const Vec2 a = wall.at(i), b = wall.at(i + 1);
    const Vec2 e = b - a;
    const double den = r.x() * e.y() - r.y() * e.x();
    if (std::abs(den) < 1e-12) continue;
    const Vec2 d = a - cam;
    const double t = (d.x() * e.y() - d.y() * e.x()) / den;
    const double s = (d.x() * r.y() - d.y() * r.x()) / den;
    if (t > 1e-6 && s >= 0.0 && s <= 1.0 && t < best.depth) {
      best.depth = t;
      best.side = side;
      best.arclength = wall.seg_start_arclength(i) + s * e.norm();
    }
  }
}

inline bool pose_degenerate(const Vec2& p, const Track& track) {
  double minx = 1e18, miny = 1e18, maxx = -1e18, maxy = -1e18;
  for (const auto& w : track.waypoints) {
    minx = std::min(minx, w.x());
    maxx = std::max(maxx, w.x());
    miny = std::min(miny, w.y());
    maxy = std::max(maxy, w.y());
  }
  const double cx = 0.5 * (minx + maxx), cy = 0.5 * (miny + maxy);
  const double hx = 0.5 * (maxx - minx), hy = 0.5 * (maxy - miny);
  return std::abs(p.x() - cx) > 4.0 * hx || std::abs(p.y() - cy) > 4.0 * hy;
}

inline Image blank_sky(int w, int h) {
  Image img(w, h);
  std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t(230));
  img.degenerate = true;
  return img;
}

// 2.5D column raycast against the lane-edge walls, with a dashed centerline
// marking on the floor.
inline Image render_ground(const VehicleState& state, double lateral,
                           const Track& track, int W, int H) {
  const Vec2 cam = state.position + lateral * port_dir(state.yaw);
  if (pose_degenerate(cam, track)) return blank_sky(W, H);

  Image img(W, H);
  const double f = focal(W);
  const Vec2 axis = forward_dir(state.yaw);
  const Vec2 star = -port_dir(state.yaw);
  const Polyline& center = track.centerline();
  const Polyline& left = track.left_edge();
  const Polyline& right = track.right_edge();

  for (int x = 0; x < W; ++x) {
    const double u = (x + 0.5 - W / 2.0) / f;
    RayHit hit;
    cast(cam, axis, star, u, left, 0, hit);
    cast(cam, axis, star, u, right, 1, hit);

    int top_row = 0, bottom_row = H;  // wall span, defaults to none visible
    double wall_shade = 0.0;
    if (std::isfinite(hit.depth)) {
      top_row = int(std::floor(H / 2.0 - f * (kWallHeight - kCamHeight) /
                                            hit.depth));
      bottom_row = int(std::ceil(H / 2.0 + f * kCamHeight / hit.depth));
      const double base = hit.side == 0 ? 0.40 : 0.62;
      const double tex = 0.22 * band(hit.arclength, track.texture_seed,
                                     hit.side);
      const double fade = 1.0 / (1.0 + 0.03 * hit.depth);
      wall_shade = (base + tex) * fade;
    } else {
      top_row = H / 2;
      bottom_row = H / 2;
    }
    top_row = std::clamp(top_row, 0, H);
    bottom_row = std::clamp(bottom_row, 0, H);

    for (int y = 0; y < H; ++y) {
      double v;
      if (y < top_row) {
        v = 0.90;  // sky
      } else if (y < bottom_row) {
        v = wall_shade;
      } else {
        const double dy = (y + 0.5 - H / 2.0) / f;
        const double depth = dy > 1e-6 ? kCamHeight / dy : 1e9;
        if (std::isfinite(hit.depth) && depth > hit.depth) {
          v = wall_shade;  // floor behind the wall is occluded
        } else {
          const Vec2 q = cam + depth * (axis + u * star);
          const auto np = center.nearest(q);
          const bool dash = std::fmod(np.arclength, 4.0) < 2.0;
          if (np.distance < 0.15 && dash) {
            v = 0.97;
          } else {
            v = 0.18 + 0.30 / (1.0 + 0.15 * depth);
          }
        }
      }
      img.set_norm(x, y, v);
    }
  }
  return img;
}

struct AirPrim {
  double depth;
  int x0, y0, x1, y1;
  double shade;
  bool fill;  // small filled square instead of a line
};

inline void draw_line(Image& img, int x0, int y0, int x1, int y1,
                      double shade) {
  int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int guard = 4 * (img.width + img.height);
  while (guard-- > 0) {
    if (x0 >= 0 && x0 < img.width && y0 >= 0 && y0 < img.height)
      img.set_norm(x0, y0, shade);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

inline bool project(const Vec3& q, const Vec3& cam, const Vec2& axis,
                    const Vec2& star, double f, int W, int H, double& px,
                    double& py, double& depth) {
  const Vec2 r2(q.x() - cam.x(), q.y() - cam.y());
  depth = r2.dot(axis);
  if (depth < 0.3) return false;
  px = W / 2.0 + f * r2.dot(star) / depth;
  py = H / 2.0 + f * (q.z() - cam.z()) / depth;
  return true;
}

// Perspective projection of gate rectangles and path markers with
// painter's-order occlusion.
inline Image render_air(const VehicleState& state, double lateral,
                        double vertical, const GateCourse& course, int W,
                        int H) {
  const Vec2 cam2 = state.position + lateral * port_dir(state.yaw);
  const Vec3 cam(cam2.x(), cam2.y(), state.z - vertical);

  double minx = 1e18, maxx = -1e18;
  for (const auto& g : course.gates) {
    minx = std::min(minx, g.center.x());
    maxx = std::max(maxx, g.center.x());
  }
  const double span = std::max(maxx - minx, 10.0);
  const auto np = course.reference_path().nearest(cam);
  if (np.distance > 4.0 * span) return blank_sky(W, H);

  Image img(W, H);
  std::fill(img.pixels.begin(), img.pixels.end(), std::uint8_t(25));
  const double f = focal(W);
  const Vec2 axis = forward_dir(state.yaw);
  const Vec2 star = -port_dir(state.yaw);

  std::vector<AirPrim> prims;
  const Polyline3& path = course.reference_path();
  for (double s = 0.0; s < path.length(); s += 1.0) {
    const Vec3 q = path.point_at(s);
    double px, py, d;
    if (!project(q, cam, axis, star, f, W, H, px, py, d)) continue;
    const int half = std::max(0, int(f * 0.08 / d));
    prims.push_back({d, int(px) - half, int(py) - half, int(px) + half,
                     int(py) + half, 0.55 / (1.0 + 0.02 * d) + 0.25, true});
  }
  for (const auto& g : course.gates) {
    const Vec2 side2 = port_dir(g.yaw);
    const Vec3 side(side2.x(), side2.y(), 0.0);
    const Vec3 up(0.0, 0.0, -1.0);
    const Vec3 c[4] = {g.center + 0.5 * g.width * side + 0.5 * g.height * up,
                       g.center - 0.5 * g.width * side + 0.5 * g.height * up,
                       g.center - 0.5 * g.width * side - 0.5 * g.height * up,
                       g.center + 0.5 * g.width * side - 0.5 * g.height * up};
    for (int e = 0; e < 4; ++e) {
      double x0, y0, d0, x1, y1, d1;
      if (!project(c[e], cam, axis, star, f, W, H, x0, y0, d0)) continue;
      if (!project(c[(e + 1) % 4], cam, axis, star, f, W, H, x1, y1, d1))
        continue;
      const double d = 0.5 * (d0 + d1);
      prims.push_back({d, int(x0), int(y0), int(x1), int(y1),
                       0.9 / (1.0 + 0.015 * d) + 0.1, false});
    }
  }

  std::sort(prims.begin(), prims.end(),
            [](const AirPrim& a, const AirPrim& b) { return a.depth > b.depth; });
  for (const auto& p : prims) {
    if (p.fill) {
      for (int y = p.y0; y <= p.y1; ++y)
        for (int x = p.x0; x <= p.x1; ++x)
          if (x >= 0 && x < W && y >= 0 && y < H) img.set_norm(x, y, p.shade);
    } else {
      draw_line(img, p.x0, p.y0, p.x1, p.y1, p.shade);
    }
  }
  return img;
}

}  // namespace render_detail

inline Image render_view(const VehicleState& state, double lateral,
                         double vertical, const World& world, int W = 64,
                         int H = 48) {
  if (std::holds_alternative<Track>(world)) {
    return render_detail::render_ground(state, lateral, std::get<Track>(world),
                                        W, H);
  }
  return render_detail::render_air(state, lateral, vertical,
                                   std::get<GateCourse>(world), W, H);
}

inline Image render_view(const VehicleState& state, const ViewpointOffset& vp,
                         const World& world, int W = 64, int H = 48) {
  return render_view(state, vp.lateral, vp.vertical, world, W, H);
}

// One image per rig viewpoint, center first.
inline std::vector<Image> observe(const VehicleState& state,
                                  const CameraRig& rig, const World& world) {
  std::vector<Image> out;
  out.reserve(rig.offsets.size());
  for (const auto& vp : rig.offsets)
    out.push_back(
        render_view(state, vp, world, rig.image_width, rig.image_height));
  return out;
}

}  // namespace equinav
