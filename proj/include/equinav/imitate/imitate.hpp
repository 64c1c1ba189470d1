#pragma once

#include <random>
#include <string>
#include <vector>

#include "equinav/augment/builders.hpp"
#include "equinav/nn/adam.hpp"

namespace equinav {

template <typename T>
struct PolicyTrainConfig {
  int epochs = 30;
  int batch_size = 64;
  AdamConfig<T> adam{};
  std::uint64_t seed = 0;
};

struct PolicyTrainResult {
  std::vector<double> epoch_loss;  // mean ||a - pi(z)||^2 per epoch
};

// Behavioral cloning on embeddings: minibatch Adam on the squared action
// error with mean-over-batch reduction.
inline PolicyTrainResult train_policy(Policy<float>& pi,
                                      const EmbeddingDataset& data,
                                      const PolicyTrainConfig<float>& cfg) {
  require(data.size() > 0, "train_policy: empty dataset");
  require(pi.dim() == data.dim && pi.action_dim() == data.action_dim,
          "train_policy: policy/dataset dimension mismatch");
  auto params = pi.params();
  Adam<float> opt(params, cfg.adam);
  auto rng = make_rng(split_seed(cfg.seed, 0x9011));
  std::vector<Eigen::Index> idx(std::size_t(data.size()), 0);
  for (Eigen::Index i = 0; i < data.size(); ++i) idx[std::size_t(i)] = i;

  PolicyTrainResult res;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < idx.size();
         start += std::size_t(cfg.batch_size)) {
      const std::size_t stop =
          std::min(start + std::size_t(cfg.batch_size), idx.size());
      Mat<float> z(data.dim, Eigen::Index(stop - start));
      Mat<float> a(data.action_dim, Eigen::Index(stop - start));
      for (std::size_t i = start; i < stop; ++i) {
        z.col(Eigen::Index(i - start)) = data.Z.col(idx[i]);
        a.col(Eigen::Index(i - start)) = data.A.col(idx[i]);
      }
      typename Policy<float>::Cache cache;
      const Mat<float> out = pi.forward(z, &cache);
      const Mat<float> diff = out - a;
      loss_sum += double(diff.squaredNorm());
      zero_grads(params);
      pi.backward(Mat<float>(2.0f / float(z.cols()) * diff), cache);
      opt.step(params);
    }
    res.epoch_loss.push_back(loss_sum / double(data.size()));
  }
  return res;
}

// Intervention thresholds: lane half-width on the ground, a fixed radius
// around the reference path in the air.
inline double intervention_threshold(const World& world) {
  if (std::holds_alternative<Track>(world))
    return std::get<Track>(world).lane_half_width;
  return 2.5;
}

inline double cross_track_error(const VehicleState& s, const World& world) {
  if (std::holds_alternative<Track>(world))
    return cross_track_error(s, std::get<Track>(world));
  return cross_track_error(s, std::get<GateCourse>(world));
}

constexpr double kTakeoverSeconds = 6.0;

struct LogRow {
  int step = 0;
  double time = 0;
  double x = 0, y = 0, z = 0, yaw = 0;
  std::vector<double> action;
  double cte = 0;
  bool expert_in_control = false;
  bool intervention = false;  // rising edge: the step the expert took over
};

struct TrajectoryLog {
  std::vector<LogRow> rows;
  double elapsed_s = 0;
  int interventions = 0;
};

// Closed-loop rollout. The policy drives until its cross-track error
// exceeds the threshold; then the expert takes over for six seconds. Each
// takeover counts as one intervention.
inline TrajectoryLog rollout(const Policy<float>& pi,
                             const Encoder<float>& enc, const World& world,
                             const CameraRig& rig, VehicleState s,
                             int n_steps) {
  TrajectoryLog log;
  const double threshold = intervention_threshold(world);
  const int takeover_steps = int(std::lround(kTakeoverSeconds / kDt));
  int expert_left = 0;

  for (int t = 0; t < n_steps; ++t) {
    LogRow row;
    row.step = t;
    row.time = s.time;
    row.x = s.position.x();
    row.y = s.position.y();
    row.z = s.z;
    row.yaw = s.yaw;
    row.cte = cross_track_error(s, world);

    if (expert_left == 0 && row.cte > threshold) {
      expert_left = takeover_steps;
      row.intervention = true;
      ++log.interventions;
    }

    if (expert_left > 0) {
      row.expert_in_control = true;
      row.action = expert_action_vector(s, world);
      --expert_left;
    } else {
      const Image img = render_view(s, rig.offsets[0], world);
      const std::vector<float> px = img.normalized();
      Vec<float> x(Eigen::Index(px.size()));
      std::copy(px.begin(), px.end(), x.data());
      const Vec<float> a = pi.forward(Vec<float>(enc.forward(x)));
      if (std::holds_alternative<Track>(world)) {
        row.action = {double(clip(GroundAction{double(a(0))}).steering)};
      } else {
        const AirAction c = clip(AirAction{double(a(0)), double(a(1))});
        row.action = {c.dyaw, c.dz};
      }
    }

    s = step_with_action(s, row.action, world);
    log.rows.push_back(std::move(row));
  }
  log.elapsed_s = double(n_steps) * kDt;
  return log;
}

// Renders the cameras a strategy needs and relabels every visited state
// with the expert's action.
inline Dataset relabel_with_expert(const std::vector<VehicleState>& states,
                                   const World& world, const CameraRig& rig,
                                   Strategy strategy, int episode_base) {
  const bool center_only = strategy != Strategy::kAllcams;
  Dataset ds;
  ds.rig = rig;
  for (std::size_t i = 0; i < states.size(); ++i) {
    Sample sample;
    sample.episode = episode_base;
    sample.step = int(i);
    sample.state = states[i];
    sample.images.resize(rig.offsets.size());
    for (std::size_t v = 0; v < rig.offsets.size(); ++v) {
      if (v > 0 && center_only) continue;
      sample.images[v] = render_view(states[i], rig.offsets[v], world);
    }
    sample.action = expert_action_vector(states[i], world);
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

struct DaggerConfig {
  int episodes = 4;
  int steps_per_episode = 200;
  PolicyTrainConfig<float> train{};
  std::uint64_t seed = 0;
};

struct DaggerResult {
  std::vector<TrajectoryLog> logs;  // one per rollout episode
  Eigen::Index aggregate_size = 0;
};

// One DAgger iteration: roll out the current policy, relabel visited states
// with the expert, augment per strategy, aggregate, and retrain the policy
// from its current weights with a fresh optimizer.
inline DaggerResult dagger_iterate(Policy<float>& pi, EmbeddingDataset& agg,
                                   const World& world, const CameraRig& rig,
                                   Strategy strategy,
                                   const AugmentContext& ctx,
                                   const DaggerConfig& cfg) {
  DaggerResult res;
  for (int e = 0; e < cfg.episodes; ++e) {
    auto rng = make_rng(split_seed(cfg.seed, 0xda66e4 + std::uint64_t(e)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    VehicleState s0;
    if (std::holds_alternative<Track>(world)) {
      const Track& track = std::get<Track>(world);
      s0 = start_state(track, u01(rng) * track.centerline().length());
    } else {
      const GateCourse& course = std::get<GateCourse>(world);
      s0 = start_state(course,
                       u01(rng) * 0.5 * course.reference_path().length());
    }
    TrajectoryLog log = rollout(pi, ctx.model->encoder(), world, rig, s0,
                                cfg.steps_per_episode);
    std::vector<VehicleState> visited;
    visited.reserve(log.rows.size());
    for (const auto& r : log.rows) {
      VehicleState v;
      v.position = {r.x, r.y};
      v.z = r.z;
      v.yaw = r.yaw;
      v.time = r.time;
      v.speed = std::holds_alternative<Track>(world) ? kGroundSpeed
                                                     : kAirSpeed;
      visited.push_back(v);
    }
    const Dataset relabeled =
        relabel_with_expert(visited, world, rig, strategy, e);
    const EmbeddingDataset extra = build_for_strategy(relabeled, strategy, ctx);
    agg.append(extra.Z, extra.A, extra.episode, extra.step,
               "dagger:" + to_string(strategy));
    res.logs.push_back(std::move(log));
  }
  train_policy(pi, agg, cfg.train);
  res.aggregate_size = agg.size();
  return res;
}

}  // namespace equinav
