#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "equinav/augment/dataset.hpp"
#include "equinav/repr/train.hpp"

namespace equinav {

// Additive action correction for one off-center camera: the action the
// expert would have taken if the vehicle itself were at that camera's pose.
struct ViewCorrection {
  std::string viewpoint;
  std::vector<double> delta;  // added component-wise to the recorded action
};

struct PlatformProfile {
  Platform platform = Platform::kGroundSim;
  std::vector<ViewCorrection> corrections;

  const ViewCorrection& correction_for(const std::string& viewpoint) const {
    for (const auto& c : corrections)
      if (c.viewpoint == viewpoint) return c;
    throw EquinavError("no action correction for viewpoint: " + viewpoint);
  }
};

inline PlatformProfile profile_for(Platform p) {
  switch (p) {
    case Platform::kGroundSim:
      return {p, {{"left", {0.05}}, {"right", {-0.05}}}};
    case Platform::kFlying:
      return {p,
              {{"left", {0.03, 0.0}},
               {"right", {-0.03, 0.0}},
               {"top", {0.0, 0.5}},
               {"bottom", {0.0, -0.5}}}};
    case Platform::kHuskyProfile:
      // Angular-velocity corrections in rad/s for the physical rig.
      return {p, {{"left", {-0.1}}, {"right", {0.1}}}};
  }
  throw EquinavError("unknown platform");
}

inline std::vector<double> correct_action(const PlatformProfile& profile,
                                          const std::string& viewpoint,
                                          std::vector<double> action) {
  if (viewpoint == "center") return action;
  const ViewCorrection& c = profile.correction_for(viewpoint);
  require(c.delta.size() == action.size(),
          "correction dimension does not match the action");
  for (std::size_t i = 0; i < action.size(); ++i) action[i] += c.delta[i];
  switch (profile.platform) {
    case Platform::kGroundSim:
      action[0] = clip(GroundAction{action[0]}).steering;
      break;
    case Platform::kFlying: {
      const AirAction a = clip(AirAction{action[0], action[1]});
      action = {a.dyaw, a.dz};
      break;
    }
    case Platform::kHuskyProfile:
      break;  // wheel-rate limits are enforced on the robot itself
  }
  return action;
}

// Augmentation strategies selectable from the command line.
enum class Strategy {
  kCenter,
  kAllcams,
  kEquivariant,
  kNoise,
  kRandomMap,
  kDetMap,
};

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kCenter: return "center";
    case Strategy::kAllcams: return "allcams";
    case Strategy::kEquivariant: return "equivariant";
    case Strategy::kNoise: return "noise";
    case Strategy::kRandomMap: return "random-map";
    case Strategy::kDetMap: return "det-map";
  }
  throw EquinavError("unknown strategy");
}

inline Strategy strategy_from_string(const std::string& s) {
  for (Strategy v : {Strategy::kCenter, Strategy::kAllcams,
                     Strategy::kEquivariant, Strategy::kNoise,
                     Strategy::kRandomMap, Strategy::kDetMap})
    if (to_string(v) == s) return v;
  throw EquinavError("unknown strategy: " + s);
}

// Embeddings paired with actions, ready for policy training. `provenance`
// records how each column was produced ("center", "left", "noise:0.10",
// "map:left", ...).
struct EmbeddingDataset {
  int dim = 0;
  int action_dim = 0;
  Mat<float> Z;  // dim x N
  Mat<float> A;  // action_dim x N
  std::vector<int> episode, step;
  std::vector<std::string> provenance;

  Eigen::Index size() const { return Z.cols(); }

  void append(const Mat<float>& z, const Mat<float>& a,
              const std::vector<int>& ep, const std::vector<int>& st,
              const std::string& tag) {
    require(z.cols() == a.cols(), "embedding/action count mismatch");
    const Eigen::Index old = Z.cols();
    Z.conservativeResize(dim, old + z.cols());
    A.conservativeResize(action_dim, old + a.cols());
    Z.rightCols(z.cols()) = z;
    A.rightCols(a.cols()) = a;
    episode.insert(episode.end(), ep.begin(), ep.end());
    step.insert(step.end(), st.begin(), st.end());
    provenance.insert(provenance.end(), std::size_t(z.cols()), tag);
  }
};

namespace augment_detail {

// Stacks one camera's images as normalized float columns. Only the
// requested viewpoint is touched, so builders that never need side cameras
// work on datasets where those images were not recorded.
inline Mat<float> image_matrix(const Dataset& ds, std::size_t view_index) {
  require(!ds.samples.empty(), "empty dataset");
  const Image& first = ds.samples[0].images.at(view_index);
  require(first.width > 0 && first.height > 0, "missing camera image");
  Mat<float> m(Eigen::Index(first.width) * first.height,
               Eigen::Index(ds.samples.size()));
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const std::vector<float> px =
        ds.samples[i].images.at(view_index).normalized();
    require(Eigen::Index(px.size()) == m.rows(), "inconsistent image sizes");
    std::copy(px.begin(), px.end(), m.col(Eigen::Index(i)).data());
  }
  return m;
}

inline Mat<float> action_matrix(const Dataset& ds) {
  const int k = ds.action_dim();
  Mat<float> a(k, Eigen::Index(ds.samples.size()));
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    for (int j = 0; j < k; ++j)
      a(j, Eigen::Index(i)) = float(ds.samples[i].action[std::size_t(j)]);
  return a;
}

inline Mat<float> corrected_action_matrix(const Dataset& ds,
                                          const PlatformProfile& profile,
                                          const std::string& viewpoint) {
  const int k = ds.action_dim();
  Mat<float> a(k, Eigen::Index(ds.samples.size()));
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const std::vector<double> c =
        correct_action(profile, viewpoint, ds.samples[i].action);
    for (int j = 0; j < k; ++j) a(j, Eigen::Index(i)) = float(c[std::size_t(j)]);
  }
  return a;
}

inline void meta(const Dataset& ds, std::vector<int>& ep,
                 std::vector<int>& st) {
  ep.clear();
  st.clear();
  for (const auto& s : ds.samples) {
    ep.push_back(s.episode);
    st.push_back(s.step);
  }
}

inline EmbeddingDataset empty_like(const Dataset& ds, int dim) {
  EmbeddingDataset out;
  out.dim = dim;
  out.action_dim = ds.action_dim();
  out.Z.resize(dim, 0);
  out.A.resize(out.action_dim, 0);
  return out;
}

}  // namespace augment_detail

// Converts a recorded dataset into the tuple form the representation
// trainer consumes.
inline TupleSet<float> to_tuple_set(const Dataset& ds) {
  TupleSet<float> t;
  for (std::size_t v = 0; v < ds.rig.offsets.size(); ++v) {
    t.viewpoints.push_back(ds.rig.offsets[v].id);
    t.images.push_back(augment_detail::image_matrix(ds, v));
  }
  for (const auto& s : ds.samples) t.episode.push_back(s.episode);
  return t;
}

// Gaussian pixel noise, clipped back to the valid intensity range.
inline Mat<float> add_pixel_noise(const Mat<float>& images, double sigma,
                                  std::mt19937_64& rng) {
  if (sigma == 0.0) return images;
  std::normal_distribution<double> noise(0.0, sigma);
  Mat<float> out = images;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out.data()[i] = float(std::clamp(double(out.data()[i]) + noise(rng),
                                     0.0, 1.0));
  return out;
}

// Baseline: center-camera embeddings with the recorded expert actions.
inline EmbeddingDataset build_center(const Dataset& ds,
                                     const Encoder<float>& enc) {
  EmbeddingDataset out = augment_detail::empty_like(ds, enc.embed_dim());
  std::vector<int> ep, st;
  augment_detail::meta(ds, ep, st);
  out.append(enc.forward(augment_detail::image_matrix(ds, 0)),
             augment_detail::action_matrix(ds), ep, st, "center");
  return out;
}

// All physical cameras with label-corrected actions.
inline EmbeddingDataset build_allcams(const Dataset& ds,
                                      const Encoder<float>& enc,
                                      const PlatformProfile& profile) {
  EmbeddingDataset out = augment_detail::empty_like(ds, enc.embed_dim());
  std::vector<int> ep, st;
  augment_detail::meta(ds, ep, st);
  for (std::size_t v = 0; v < ds.rig.offsets.size(); ++v) {
    const std::string& name = ds.rig.offsets[v].id;
    out.append(enc.forward(augment_detail::image_matrix(ds, v)),
               augment_detail::corrected_action_matrix(ds, profile, name),
               ep, st, name);
  }
  return out;
}

// Maps a batch of center embeddings to the named viewpoint's embedding.
using EmbedMapFn =
    std::function<Mat<float>(const std::string&, const Mat<float>&)>;

inline EmbedMapFn learned_map(const ReprModel<float>& model) {
  return [&model](const std::string& v, const Mat<float>& z) {
    return model.map_for(v).forward(z);
  };
}

// Ablation: maps with the learned architecture but untrained random weights.
inline EmbedMapFn random_map(const std::vector<std::string>& viewpoints,
                             int dim, int hidden, std::uint64_t seed) {
  auto maps = std::make_shared<std::vector<EqMap<float>>>();
  auto rng = make_rng(seed);
  for (const auto& v : viewpoints) {
    maps->emplace_back(v, dim, hidden);
    maps->back().init(rng);
  }
  return [maps](const std::string& v, const Mat<float>& z) -> Mat<float> {
    for (const auto& m : *maps)
      if (m.viewpoint() == v) return m.forward(z);
    throw EquinavError("random map: unknown viewpoint " + v);
  };
}

// Ablation: a hand-coded shift, broadcasting the camera's lateral offset to
// every embedding coordinate. Only the ground rig's side cameras have a
// defined offset here.
inline EmbedMapFn deterministic_map() {
  return [](const std::string& v, const Mat<float>& z) -> Mat<float> {
    if (v == "left") return z.array() + 0.25f;
    if (v == "right") return z.array() - 0.25f;
    throw EquinavError("deterministic map: unsupported viewpoint " + v);
  };
}

// Equivariant augmentation: only center images are encoded; side-viewpoint
// embeddings are synthesized by the map and paired with corrected actions.
inline EmbeddingDataset build_equivariant(const Dataset& ds,
                                          const Encoder<float>& enc,
                                          const EmbedMapFn& map,
                                          const PlatformProfile& profile) {
  EmbeddingDataset out = augment_detail::empty_like(ds, enc.embed_dim());
  std::vector<int> ep, st;
  augment_detail::meta(ds, ep, st);
  const Mat<float> zc = enc.forward(augment_detail::image_matrix(ds, 0));
  out.append(zc, augment_detail::action_matrix(ds), ep, st, "center");
  for (std::size_t v = 1; v < ds.rig.offsets.size(); ++v) {
    const std::string& name = ds.rig.offsets[v].id;
    out.append(map(name, zc),
               augment_detail::corrected_action_matrix(ds, profile, name),
               ep, st, "map:" + name);
  }
  return out;
}

// Pixel-noise augmentation: originals plus one noisy copy per sigma, all
// keeping the recorded action.
inline EmbeddingDataset build_noise(const Dataset& ds,
                                    const Encoder<float>& enc,
                                    const std::vector<double>& sigmas,
                                    std::uint64_t seed) {
  EmbeddingDataset out = augment_detail::empty_like(ds, enc.embed_dim());
  std::vector<int> ep, st;
  augment_detail::meta(ds, ep, st);
  const Mat<float> imgs = augment_detail::image_matrix(ds, 0);
  const Mat<float> actions = augment_detail::action_matrix(ds);
  out.append(enc.forward(imgs), actions, ep, st, "center");
  for (std::size_t k = 0; k < sigmas.size(); ++k) {
    auto rng = make_rng(split_seed(seed, std::uint64_t(k)));
    char tag[32];
    std::snprintf(tag, sizeof(tag), "noise:%.2f", sigmas[k]);
    out.append(enc.forward(add_pixel_noise(imgs, sigmas[k], rng)), actions,
               ep, st, tag);
  }
  return out;
}

// Everything one needs to turn raw samples into embeddings under any
// strategy. The encoder is shared; maps/profile/sigmas apply per strategy.
struct AugmentContext {
  const ReprModel<float>* model = nullptr;
  PlatformProfile profile;
  std::vector<double> sigmas;
  std::uint64_t noise_seed = 0;
  EmbedMapFn random_map_fn;  // built once so DAgger reuses the same weights
};

inline EmbeddingDataset build_for_strategy(const Dataset& ds, Strategy s,
                                           const AugmentContext& ctx) {
  require(ctx.model != nullptr, "augment context needs a model");
  const Encoder<float>& enc = ctx.model->encoder();
  switch (s) {
    case Strategy::kCenter:
      return build_center(ds, enc);
    case Strategy::kAllcams:
      return build_allcams(ds, enc, ctx.profile);
    case Strategy::kEquivariant:
      return build_equivariant(ds, enc, learned_map(*ctx.model), ctx.profile);
    case Strategy::kNoise:
      return build_noise(ds, enc, ctx.sigmas, ctx.noise_seed);
    case Strategy::kRandomMap:
      require(bool(ctx.random_map_fn), "random-map strategy needs a map");
      return build_equivariant(ds, enc, ctx.random_map_fn, ctx.profile);
    case Strategy::kDetMap:
      return build_equivariant(ds, enc, deterministic_map(), ctx.profile);
  }
  throw EquinavError("unknown strategy");
}

}  // namespace equinav
