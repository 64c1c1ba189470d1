#include <gtest/gtest.h>

#include <random>

#include "equinav/imitate/imitate.hpp"

using namespace equinav;

namespace {

EmbeddingDataset linear_toy(int dim, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  EmbeddingDataset d;
  d.dim = dim;
  d.action_dim = 1;
  d.Z.resize(dim, n);
  d.A.resize(1, n);
  Vec<float> w(dim);
  for (int i = 0; i < dim; ++i) w(i) = float(dist(rng)) * 0.3f;
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < dim; ++r) d.Z(r, i) = float(dist(rng));
    d.A(0, i) = w.dot(d.Z.col(i));
    d.episode.push_back(0);
    d.step.push_back(i);
    d.provenance.push_back("center");
  }
  return d;
}

}  // namespace

TEST(PolicyTraining, RecoversLinearActionMap) {
  const EmbeddingDataset data = linear_toy(12, 64, 3);
  Policy<float> pi(12, 1, 32, 16);
  std::mt19937_64 rng(5);
  pi.init(rng);

  PolicyTrainConfig<float> cfg;
  cfg.epochs = 400;
  cfg.batch_size = 16;
  cfg.adam.lr = 3e-3f;
  cfg.seed = 7;
  auto res = train_policy(pi, data, cfg);
  // An exactly realizable target: squared error should collapse.
  EXPECT_LT(res.epoch_loss.back(), 1e-3);
  EXPECT_LT(res.epoch_loss.back(), res.epoch_loss.front() * 1e-2);
}

TEST(PolicyTraining, DeterministicForFixedSeed) {
  const EmbeddingDataset data = linear_toy(8, 32, 11);
  auto run = [&] {
    Policy<float> pi(8, 1, 16, 8);
    std::mt19937_64 rng(13);
    pi.init(rng);
    PolicyTrainConfig<float> cfg;
    cfg.epochs = 5;
    cfg.batch_size = 8;
    cfg.seed = 17;
    return train_policy(pi, data, cfg).epoch_loss;
  };
  EXPECT_EQ(run(), run());
}

TEST(PolicyTraining, DimensionMismatchThrows) {
  const EmbeddingDataset data = linear_toy(8, 8, 19);
  Policy<float> pi(9, 1);
  EXPECT_THROW(train_policy(pi, data, PolicyTrainConfig<float>{}),
               EquinavError);
}

TEST(Rollout, InterventionRuleAndTakeoverDuration) {
  // Zero-weight encoder and policy: the vehicle drives straight, leaves the
  // corridor, and the expert must take over for exactly 6 s at a time.
  const Track track = generate_track(3, 12, 1.0);
  const World world = track;
  Encoder<float> enc = make_encoder<float>();
  Policy<float> pi(enc.embed_dim(), 1);

  VehicleState s0 = start_state(track, 0.0);
  const TrajectoryLog log =
      rollout(pi, enc, world, ground_rig(), s0, 400);

  ASSERT_EQ(log.rows.size(), 400u);
  EXPECT_GE(log.interventions, 1);
  EXPECT_DOUBLE_EQ(log.elapsed_s, 40.0);

  const double th = track.lane_half_width;
  int flagged = 0;
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    const auto& r = log.rows[i];
    if (r.intervention) ++flagged;
    // The expert responds the moment the threshold is crossed.
    if (r.cte > th) EXPECT_TRUE(r.expert_in_control) << "step " << i;
    if (r.intervention) {
      for (std::size_t j = i; j < std::min(i + 60, log.rows.size()); ++j)
        EXPECT_TRUE(log.rows[j].expert_in_control) << "step " << j;
    }
  }
  EXPECT_EQ(flagged, log.interventions);
}

TEST(Rollout, AirInterventionUsesFixedRadius) {
  const GateCourse course = generate_gate_course(5, 8);
  const World world = course;
  EXPECT_DOUBLE_EQ(intervention_threshold(world), 2.5);
  Encoder<float> enc = make_encoder<float>();
  Policy<float> pi(enc.embed_dim(), 2);
  const TrajectoryLog log = rollout(pi, enc, world, flying_rig(),
                                    start_state(course, 0.0), 200);
  for (const auto& r : log.rows)
    if (r.cte > 2.5) EXPECT_TRUE(r.expert_in_control);
  EXPECT_EQ(log.rows[0].action.size(), 2u);
}

TEST(Relabel, UsesExpertActionsAtVisitedStates) {
  const Track track = generate_track(3, 12, 1.0);
  const World world = track;
  std::vector<VehicleState> states;
  for (int i = 0; i < 5; ++i)
    states.push_back(start_state(track, 3.0 * i, 0.4, 0.1));
  const Dataset ds = relabel_with_expert(states, world, ground_rig(),
                                         Strategy::kEquivariant, 9);
  ASSERT_EQ(ds.samples.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(ds.samples[i].action[0],
                     expert_ground(states[i], track).steering);
    EXPECT_EQ(ds.samples[i].episode, 9);
    // Center-only strategies skip the side cameras entirely.
    EXPECT_GT(ds.samples[i].images[0].width, 0);
    EXPECT_EQ(ds.samples[i].images[1].width, 0);
  }
  const Dataset all = relabel_with_expert(states, world, ground_rig(),
                                          Strategy::kAllcams, 0);
  EXPECT_GT(all.samples[0].images[1].width, 0);
}

TEST(Dagger, AggregatesAndRetrainsWithFrozenEncoder) {
  const Track track = generate_track(3, 12, 1.0);
  const World world = track;
  auto model = make_repr_model<float>({"left", "right"});
  std::mt19937_64 rng(23);
  model.init(rng);

  AugmentContext ctx;
  ctx.model = &model;
  ctx.profile = profile_for(Platform::kGroundSim);

  Policy<float> pi(model.encoder().embed_dim(), 1);
  pi.init(rng);

  // Seed aggregate from a small expert dataset.
  const Dataset seed_ds = collect_dataset(world, ground_rig(), 2, 10, 31);
  EmbeddingDataset agg =
      build_for_strategy(seed_ds, Strategy::kEquivariant, ctx);
  const Eigen::Index before = agg.size();
  ASSERT_EQ(before, 60);  // 20 samples x 3 viewpoints

  const std::uint64_t enc_hash = param_hash(model.encoder().params());
  const std::uint64_t pi_hash = param_hash(pi.params());

  DaggerConfig cfg;
  cfg.episodes = 2;
  cfg.steps_per_episode = 15;
  cfg.train.epochs = 3;
  cfg.train.adam.lr = 1e-3f;
  cfg.seed = 37;
  const DaggerResult res =
      dagger_iterate(pi, agg, world, ground_rig(), Strategy::kEquivariant,
                     ctx, cfg);

  EXPECT_EQ(res.logs.size(), 2u);
  EXPECT_EQ(agg.size(), before + 2 * 15 * 3);
  EXPECT_EQ(res.aggregate_size, agg.size());
  // DAgger retrains the policy but never touches the representation.
  EXPECT_EQ(param_hash(model.encoder().params()), enc_hash);
  EXPECT_NE(param_hash(pi.params()), pi_hash);
}
