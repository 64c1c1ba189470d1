#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "equinav/core.hpp"

namespace equinav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

// Heading convention: forward(yaw) advances the vehicle, positive steering /
// positive dyaw rotates the heading toward starboard(yaw), i.e. away from the
// rig's "left" viewpoint which sits along port(yaw).
inline Vec2 forward_dir(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }
inline Vec2 port_dir(double yaw) { return {std::sin(yaw), -std::cos(yaw)}; }

// Signed bearing of target direction relative to heading; positive values are
// reached by positive steering.
inline double bearing_from(double yaw, const Vec2& dir) {
  const Vec2 f = forward_dir(yaw);
  const double cross = f.x() * dir.y() - f.y() * dir.x();
  const double dot = f.dot(dir);
  return std::atan2(cross, dot);
}

struct NearestPoint {
  Vec2 point;
  double distance = 0.0;
  double arclength = 0.0;  // along the polyline to the projection
};

struct NearestPoint3 {
  Vec3 point;
  double distance = 0.0;
  double arclength = 0.0;
};

// Dense polyline with cached cumulative arclength. If closed, the segment from
// back() to front() is part of the curve.
class Polyline {
 public:
  Polyline() = default;
  Polyline(std::vector<Vec2> pts, bool closed)
      : pts_(std::move(pts)), closed_(closed) {
    require(pts_.size() >= 2, "polyline needs >= 2 points");
    cum_.resize(n_segments() + 1);
    cum_[0] = 0.0;
    for (std::size_t i = 0; i < n_segments(); ++i)
      cum_[i + 1] = cum_[i] + (at(i + 1) - at(i)).norm();
  }

  std::size_t n_segments() const {
    return closed_ ? pts_.size() : pts_.size() - 1;
  }
  const std::vector<Vec2>& points() const { return pts_; }
  bool closed() const { return closed_; }
  double length() const { return cum_.back(); }

  Vec2 at(std::size_t i) const { return pts_[i % pts_.size()]; }
  double seg_start_arclength(std::size_t i) const { return cum_[i]; }

  NearestPoint nearest(const Vec2& p) const {
    NearestPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_segments(); ++i) {
      const Vec2 a = at(i), b = at(i + 1);
      const Vec2 ab = b - a;
      const double len2 = ab.squaredNorm();
      double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const Vec2 q = a + t * ab;
      const double d = (p - q).norm();
      if (d < best.distance) {
        best.distance = d;
        best.point = q;
        best.arclength = cum_[i] + t * std::sqrt(len2);
      }
    }
    return best;
  }

  // Point at arclength s (wrapped if closed, clamped otherwise).
  Vec2 point_at(double s) const {
    if (closed_) {
      s = std::fmod(s, length());
      if (s < 0) s += length();
    } else {
      s = std::clamp(s, 0.0, length());
    }
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = it == cum_.begin() ? 0 : std::size_t(it - cum_.begin()) - 1;
    if (i >= n_segments()) i = n_segments() - 1;
    const double seg = cum_[i + 1] - cum_[i];
    const double t = seg > 0 ? (s - cum_[i]) / seg : 0.0;
    return at(i) + t * (at(i + 1) - at(i));
  }

  double tangent_yaw_at(double s) const {
    const Vec2 a = point_at(s);
    const Vec2 b = point_at(s + 0.25);
    const Vec2 d = b - a;
    return std::atan2(d.y(), d.x());
  }

  // Parallel curve at signed lateral offset (positive toward port side of the
  // direction of travel is negative here; offset is along the left normal of
  // each tangent).
  Polyline offset(double d) const {
    std::vector<Vec2> out;
    out.reserve(pts_.size());
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const Vec2 prev = at(i + pts_.size() - 1);
      const Vec2 next = at(i + 1);
      Vec2 tang;
      if (closed_) {
        tang = (next - prev).normalized();
      } else if (i == 0) {
        tang = (at(1) - at(0)).normalized();
      } else if (i + 1 == pts_.size()) {
        tang = (at(i) - at(i - 1)).normalized();
      } else {
        tang = (next - prev).normalized();
      }
      const Vec2 normal(-tang.y(), tang.x());
      out.push_back(pts_[i] + d * normal);
    }
    return Polyline(out, closed_);
  }

 private:
  std::vector<Vec2> pts_;
  bool closed_ = false;
  std::vector<double> cum_;
};

class Polyline3 {
 public:
  Polyline3() = default;
  explicit Polyline3(std::vector<Vec3> pts) : pts_(std::move(pts)) {
    require(pts_.size() >= 2, "polyline needs >= 2 points");
    cum_.resize(pts_.size());
    cum_[0] = 0.0;
    for (std::size_t i = 1; i < pts_.size(); ++i)
      cum_[i] = cum_[i - 1] + (pts_[i] - pts_[i - 1]).norm();
  }

  const std::vector<Vec3>& points() const { return pts_; }
  double length() const { return cum_.back(); }

  NearestPoint3 nearest(const Vec3& p) const {
    NearestPoint3 best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      const Vec3 a = pts_[i], b = pts_[i + 1];
      const Vec3 ab = b - a;
      const double len2 = ab.squaredNorm();
      double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const Vec3 q = a + t * ab;
      const double d = (p - q).norm();
      if (d < best.distance) {
        best.distance = d;
        best.point = q;
        best.arclength = cum_[i] + t * std::sqrt(len2);
      }
    }
    return best;
  }

  Vec3 point_at(double s) const {
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = it == cum_.begin() ? 0 : std::size_t(it - cum_.begin()) - 1;
    if (i + 1 >= pts_.size()) i = pts_.size() - 2;
    const double seg = cum_[i + 1] - cum_[i];
    const double t = seg > 0 ? (s - cum_[i]) / seg : 0.0;
    return pts_[i] + t * (pts_[i + 1] - pts_[i]);
  }

 private:
  std::vector<Vec3> pts_;
  std::vector<double> cum_;
};

// Proper segment intersection test (shared endpoints do not count).
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                               const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q.x() - p.x()) * (r.y() - p.y()) -
                     (q.y() - p.y()) * (r.x() - p.x());
    return v > 1e-12 ? 1 : (v < -1e-12 ? -1 : 0);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d);
  const int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

// Centripetal Catmull-Rom resampling through control points.
inline std::vector<Vec2> catmull_rom_closed(const std::vector<Vec2>& ctrl,
                                            int samples_per_segment) {
  const std::size_t n = ctrl.size();
  std::vector<Vec2> out;
  out.reserve(n * samples_per_segment);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p0 = ctrl[(i + n - 1) % n];
    const Vec2 p1 = ctrl[i];
    const Vec2 p2 = ctrl[(i + 1) % n];
    const Vec2 p3 = ctrl[(i + 2) % n];
    for (int k = 0; k < samples_per_segment; ++k) {
      const double t = double(k) / samples_per_segment;
      const double t2 = t * t, t3 = t2 * t;
      const Vec2 v = 0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                            (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                            (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
      out.push_back(v);
    }
  }
  return out;
}

inline std::vector<Vec3> catmull_rom_open3(const std::vector<Vec3>& ctrl,
                                           int samples_per_segment) {
  const std::size_t n = ctrl.size();
  require(n >= 2, "need >= 2 control points");
  std::vector<Vec3> out;
  auto clamp_idx = [&](long i) {
    return std::size_t(std::clamp<long>(i, 0, long(n) - 1));
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec3 p0 = ctrl[clamp_idx(long(i) - 1)];
    const Vec3 p1 = ctrl[i];
    const Vec3 p2 = ctrl[i + 1];
    const Vec3 p3 = ctrl[clamp_idx(long(i) + 2)];
    for (int k = 0; k < samples_per_segment; ++k) {
      const double t = double(k) / samples_per_segment;
      const double t2 = t * t, t3 = t2 * t;
      const Vec3 v = 0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                            (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                            (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
      out.push_back(v);
    }
  }
  out.push_back(ctrl.back());
  return out;
}

}  // namespace equinav
