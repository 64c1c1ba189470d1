#pragma once

#include <random>
#include <vector>

#include "equinav/core.hpp"
#include "equinav/expert.hpp"
#include "equinav/render.hpp"

namespace equinav {

// One recorded expert step: synchronized images from every rig camera
// (rig order, center first) plus the expert's action.
struct Sample {
  int episode = 0;
  int step = 0;
  VehicleState state;
  std::vector<Image> images;
  std::vector<double> action;
};

struct Dataset {
  CameraRig rig;
  std::vector<Sample> samples;

  int action_dim() const {
    return samples.empty() ? 0 : int(samples[0].action.size());
  }
};

inline std::vector<double> expert_action_vector(const VehicleState& s,
                                                const World& world) {
  if (std::holds_alternative<Track>(world)) {
    return {expert_ground(s, std::get<Track>(world)).steering};
  }
  const AirAction a = expert_air(s, std::get<GateCourse>(world));
  return {a.dyaw, a.dz};
}

inline VehicleState step_with_action(const VehicleState& s,
                                     const std::vector<double>& action,
                                     const World& world) {
  if (std::holds_alternative<Track>(world)) {
    require(action.size() == 1, "ground action must have one component");
    return step_ground(s, GroundAction{action[0]});
  }
  require(action.size() == 2, "air action must have two components");
  return step_air(s, AirAction{action[0], action[1]});
}

// Drives the expert from randomized starting poses and records synchronized
// multi-camera images with the expert's action at every step. The jitter
// arguments bound the starting offset from the reference line: expert
// demonstrations for cloning should start on it (tiny jitter, so the data
// contains almost no recovery behavior), while representation-learning
// datasets want diverse poses (large jitter).
inline Dataset collect_dataset(const World& world, const CameraRig& rig,
                               int episodes, int steps_per_episode,
                               std::uint64_t seed, double lat_jitter = 0.5,
                               double yaw_jitter = 0.2) {
  require(episodes > 0 && steps_per_episode > 0,
          "collect_dataset: counts must be positive");
  Dataset ds;
  ds.rig = rig;
  for (int e = 0; e < episodes; ++e) {
    auto rng = make_rng(split_seed(seed, std::uint64_t(e)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    VehicleState s;
    if (std::holds_alternative<Track>(world)) {
      const Track& track = std::get<Track>(world);
      const double s0 = u01(rng) * track.centerline().length();
      const double lat = (u01(rng) - 0.5) * 2.0 * lat_jitter;
      const double dyaw = (u01(rng) - 0.5) * 2.0 * yaw_jitter;
      s = start_state(track, s0, lat, dyaw);
    } else {
      const GateCourse& course = std::get<GateCourse>(world);
      const double s0 =
          u01(rng) * 0.5 * course.reference_path().length();
      s = start_state(course, s0);
    }
    for (int t = 0; t < steps_per_episode; ++t) {
      Sample sample;
      sample.episode = e;
      sample.step = t;
      sample.state = s;
      sample.images = observe(s, rig, world);
      sample.action = expert_action_vector(s, world);
      ds.samples.push_back(std::move(sample));
      s = step_with_action(s, ds.samples.back().action, world);
    }
  }
  return ds;
}

}  // namespace equinav
