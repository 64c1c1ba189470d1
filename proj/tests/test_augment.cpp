#include <gtest/gtest.h>

#include "equinav/augment/builders.hpp"

using namespace equinav;

namespace {

// Synthetic ground dataset with deterministic 64x48 images; episodes of 10.
Dataset synthetic_ground_dataset(int n, bool fill_side_cameras = true) {
  Dataset ds;
  ds.rig = ground_rig();
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> shade(0, 255);
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.episode = i / 10;
    s.step = i % 10;
    s.images.resize(ds.rig.offsets.size());
    for (std::size_t v = 0; v < ds.rig.offsets.size(); ++v) {
      if (v > 0 && !fill_side_cameras) continue;  // leave default-empty
      Image img;
      img.width = 64;
      img.height = 48;
      img.pixels.resize(64 * 48);
      for (auto& p : img.pixels) p = std::uint8_t(shade(rng));
      s.images[v] = std::move(img);
    }
    s.action = {0.1 * ((i % 5) - 2)};
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Encoder<float> small_init_encoder() {
  auto enc = make_encoder<float>();
  std::mt19937_64 rng(7);
  enc.init(rng);
  return enc;
}

}  // namespace

TEST(Corrections, GroundTableValues) {
  const auto p = profile_for(Platform::kGroundSim);
  EXPECT_EQ(correct_action(p, "left", {0.0})[0], 0.05);
  EXPECT_EQ(correct_action(p, "right", {0.0})[0], -0.05);
  EXPECT_EQ(correct_action(p, "center", {0.2})[0], 0.2);
}

TEST(Corrections, GroundClipsToUnitSteering) {
  const auto p = profile_for(Platform::kGroundSim);
  EXPECT_DOUBLE_EQ(correct_action(p, "left", {0.98})[0], 1.0);
  EXPECT_DOUBLE_EQ(correct_action(p, "right", {-0.99})[0], -1.0);
}

TEST(Corrections, FlyingTableValues) {
  const auto p = profile_for(Platform::kFlying);
  const auto left = correct_action(p, "left", {0.0, 0.0});
  EXPECT_DOUBLE_EQ(left[0], 0.03);
  EXPECT_DOUBLE_EQ(left[1], 0.0);
  const auto top = correct_action(p, "top", {0.01, -0.2});
  EXPECT_DOUBLE_EQ(top[0], 0.01);
  EXPECT_DOUBLE_EQ(top[1], 0.3);
  const auto bottom = correct_action(p, "bottom", {0.0, 0.0});
  EXPECT_DOUBLE_EQ(bottom[1], -0.5);
}

TEST(Corrections, HuskyTableValues) {
  const auto p = profile_for(Platform::kHuskyProfile);
  EXPECT_DOUBLE_EQ(correct_action(p, "left", {0.0})[0], -0.1);
  EXPECT_DOUBLE_EQ(correct_action(p, "right", {0.0})[0], 0.1);
}

TEST(Corrections, AdditiveAwayFromLimits) {
  const auto p = profile_for(Platform::kGroundSim);
  for (double a : {-0.5, 0.0, 0.3}) {
    EXPECT_DOUBLE_EQ(correct_action(p, "left", {a})[0], a + 0.05);
    EXPECT_DOUBLE_EQ(correct_action(p, "right", {a})[0], a - 0.05);
  }
}

TEST(Corrections, UnknownViewpointThrows) {
  const auto p = profile_for(Platform::kGroundSim);
  EXPECT_THROW(correct_action(p, "top", {0.0}), EquinavError);
}

TEST(Builders, EntryCounts) {
  const Dataset ds = synthetic_ground_dataset(100);
  const auto enc = small_init_encoder();
  const auto profile = profile_for(Platform::kGroundSim);

  EXPECT_EQ(build_center(ds, enc).size(), 100);
  EXPECT_EQ(build_allcams(ds, enc, profile).size(), 300);

  auto model = make_repr_model<float>({"left", "right"});
  std::mt19937_64 rng(3);
  model.init(rng);
  EXPECT_EQ(
      build_equivariant(ds, model.encoder(), learned_map(model), profile)
          .size(),
      300);
  // Originals plus one copy per sigma.
  EXPECT_EQ(build_noise(ds, enc, {0.05, 0.1}, 1).size(), 300);
}

TEST(Builders, EquivariantNeverReadsSideCameras) {
  // Side cameras were never recorded; only the map-based builder works.
  const Dataset ds = synthetic_ground_dataset(20, /*fill_side_cameras=*/false);
  auto model = make_repr_model<float>({"left", "right"});
  std::mt19937_64 rng(5);
  model.init(rng);
  const auto profile = profile_for(Platform::kGroundSim);
  EXPECT_NO_THROW(
      build_equivariant(ds, model.encoder(), learned_map(model), profile));
  EXPECT_THROW(build_allcams(ds, model.encoder(), profile), EquinavError);
}

TEST(Builders, EquivariantEntriesMatchMapOfCenterEmbedding) {
  const Dataset ds = synthetic_ground_dataset(8);
  auto model = make_repr_model<float>({"left", "right"});
  std::mt19937_64 rng(11);
  model.init(rng);
  const auto profile = profile_for(Platform::kGroundSim);
  const auto out =
      build_equivariant(ds, model.encoder(), learned_map(model), profile);

  ASSERT_EQ(out.size(), 24);
  // Layout: 8 center entries, then 8 "map:left", then 8 "map:right".
  EXPECT_EQ(out.provenance[0], "center");
  EXPECT_EQ(out.provenance[8], "map:left");
  EXPECT_EQ(out.provenance[16], "map:right");

  const Mat<float> zc = out.Z.leftCols(8);
  const Mat<float> want_left = model.map_for("left").forward(zc);
  EXPECT_TRUE(out.Z.middleCols(8, 8) == want_left);
  // Corrected labels: recorded action plus the table value.
  for (int i = 0; i < 8; ++i) {
    EXPECT_FLOAT_EQ(out.A(0, 8 + i),
                    float(clip(GroundAction{ds.samples[i].action[0] + 0.05})
                              .steering));
  }
}

TEST(Builders, DeterministicMapBroadcastsLateralOffset) {
  const auto m = deterministic_map();
  Mat<float> z = Mat<float>::Zero(4, 2);
  EXPECT_TRUE(Mat<float>(m("left", z)) ==
              Mat<float>(Mat<float>::Constant(4, 2, 0.25f)));
  EXPECT_TRUE(Mat<float>(m("right", z)) ==
              Mat<float>(Mat<float>::Constant(4, 2, -0.25f)));
  EXPECT_THROW(m("top", z), EquinavError);
}

TEST(Builders, RandomMapIsDeterministicPerSeedAndUntrained) {
  Mat<float> z = Mat<float>::Random(16, 3);
  auto a = random_map({"left"}, 16, 8, 42);
  auto b = random_map({"left"}, 16, 8, 42);
  auto c = random_map({"left"}, 16, 8, 43);
  EXPECT_TRUE(Mat<float>(a("left", z)) == Mat<float>(b("left", z)));
  EXPECT_FALSE(Mat<float>(a("left", z)) == Mat<float>(c("left", z)));
}

TEST(Noise, ZeroSigmaReproducesCenterEmbeddings) {
  const Dataset ds = synthetic_ground_dataset(10);
  const auto enc = small_init_encoder();
  const auto noisy = build_noise(ds, enc, {0.0}, 7);
  const auto center = build_center(ds, enc);
  ASSERT_EQ(noisy.size(), 20);
  EXPECT_TRUE(noisy.Z.leftCols(10) == center.Z);
  EXPECT_TRUE(noisy.Z.rightCols(10) == center.Z);
}

TEST(Noise, PixelStdMatchesSigma) {
  // Mid-gray images keep the noise away from the clipping boundaries.
  Mat<float> imgs = Mat<float>::Constant(64 * 48, 40, 0.5f);
  const double sigma = 0.1;
  auto rng = make_rng(13);
  Mat<float> noisy = add_pixel_noise(imgs, sigma, rng);
  const Mat<float> diff = noisy - imgs;
  const double mean = double(diff.sum()) / double(diff.size());
  const double var =
      double(diff.array().square().sum()) / double(diff.size()) - mean * mean;
  EXPECT_NEAR(std::sqrt(var), sigma, 0.05 * sigma);
  EXPECT_GE(noisy.minCoeff(), 0.0f);
  EXPECT_LE(noisy.maxCoeff(), 1.0f);
}

TEST(Collection, ExpertDatasetShapesAndDeterminism) {
  const Track track = generate_track(3, 12, 1.0);
  const World world = track;
  const CameraRig rig = ground_rig();
  const Dataset a = collect_dataset(world, rig, 3, 15, 21);
  EXPECT_EQ(a.samples.size(), 45u);
  EXPECT_EQ(a.action_dim(), 1);
  for (const auto& s : a.samples) {
    EXPECT_EQ(s.images.size(), 3u);
    for (const auto& img : s.images) {
      EXPECT_EQ(img.width, 64);
      EXPECT_EQ(img.height, 48);
    }
    EXPECT_LE(std::abs(s.action[0]), 1.0);
  }
  const Dataset b = collect_dataset(world, rig, 3, 15, 21);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_TRUE(a.samples[i].images[0] == b.samples[i].images[0]);
    EXPECT_EQ(a.samples[i].action, b.samples[i].action);
  }
}

TEST(Collection, AirDatasetHasTwoActionComponents) {
  const GateCourse course = generate_gate_course(5, 8);
  const World world = course;
  const Dataset ds = collect_dataset(world, flying_rig(), 2, 10, 4);
  EXPECT_EQ(ds.samples.size(), 20u);
  EXPECT_EQ(ds.action_dim(), 2);
  EXPECT_EQ(ds.samples[0].images.size(), 5u);
}

TEST(Collection, TupleSetConversion) {
  const Dataset ds = synthetic_ground_dataset(30);
  const TupleSet<float> t = to_tuple_set(ds);
  ASSERT_EQ(t.viewpoints.size(), 3u);
  EXPECT_EQ(t.viewpoints[0], "center");
  EXPECT_EQ(t.size(), 30);
  EXPECT_EQ(t.episode.size(), 30u);
  EXPECT_EQ(t.images[0].rows(), 64 * 48);
}
