#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "equinav/geometry.hpp"

namespace equinav {

// Altitude convention for the air world: z increases downward, so a positive
// dz action descends and the "top" viewpoint sits at a smaller z.
struct Gate {
  Vec3 center;
  double yaw = 0.0;  // facing of the gate plane normal
  double width = 3.0;
  double height = 3.0;
};

struct GateCourse {
  std::vector<Gate> gates;

  const Polyline3& reference_path() const {
    if (!path_) {
      std::vector<Vec3> ctrl;
      ctrl.reserve(gates.size());
      for (const auto& g : gates) ctrl.push_back(g.center);
      path_ = Polyline3(catmull_rom_open3(ctrl, 8));
    }
    return *path_;
  }

 private:
  mutable std::optional<Polyline3> path_;
};

// Meandering forward course; 8 m gate spacing keeps the pairwise >= 3 m
// invariant with margin.
inline GateCourse generate_gate_course(std::uint64_t seed, int n_gates) {
  require(n_gates >= 5, "generate_gate_course: need n_gates >= 5");
  auto rng = make_rng(split_seed(seed, 0x9a7e));
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 6.28318);
  const double py = phase(rng), pz = phase(rng);

  GateCourse course;
  course.gates.reserve(n_gates);
  std::vector<Vec3> centers;
  for (int i = 0; i < n_gates; ++i) {
    Vec3 c(8.0 * i, 6.0 * std::sin(0.55 * i + py) + 0.8 * jitter(rng),
           2.0 * std::sin(0.4 * i + pz) + 0.4 * jitter(rng));
    centers.push_back(c);
  }
  for (int i = 0; i < n_gates; ++i) {
    Gate g;
    g.center = centers[i];
    const Vec3 next = centers[std::min(i + 1, n_gates - 1)];
    const Vec3 prev = centers[std::max(i - 1, 0)];
    g.yaw = std::atan2(next.y() - prev.y(), next.x() - prev.x());
    course.gates.push_back(g);
  }
  return course;
}

inline double min_pairwise_gate_distance(const GateCourse& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    for (std::size_t j = i + 1; j < c.gates.size(); ++j)
      best = std::min(best, (c.gates[i].center - c.gates[j].center).norm());
  return best;
}

}  // namespace equinav
