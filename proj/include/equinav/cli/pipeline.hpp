#pragma once

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "equinav/evalkit/evalkit.hpp"
#include "equinav/io/checkpoint.hpp"
#include "equinav/io/config.hpp"
#include "equinav/io/dataset_io.hpp"

namespace equinav {

// All tunables reachable from a config file. Anything not listed here is
// rejected so typos fail loudly.
inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "world.seed",        "world.waypoints",  "world.curvature",
      "world.gates",       "collect.episodes", "collect.steps",
      "collect.lat_jitter", "collect.yaw_jitter",
      "repr.epochs",       "repr.batch",       "repr.patience",
      "repr.lr",           "repr.dropout",     "repr.map_hidden",
      "repr.lambda_rc",    "repr.lambda_eq",   "repr.lambda_eq_rc",
      "policy.epochs",     "policy.batch",     "policy.lr",
      "dagger.iterations", "dagger.episodes",  "dagger.steps",
      "eval.episodes",     "eval.steps",       "noise.sigmas",
  };
  return keys;
}

struct PipelineContext {
  ConfigMap cfg;
  std::filesystem::path out;
  Platform platform = Platform::kGroundSim;
  std::uint64_t seed = 0;
  bool force = false;

  std::uint64_t cfg_hash() const { return config_hash(cfg); }
  std::string cfg_hash_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  (unsigned long long)cfg_hash());
    return buf;
  }
};

inline std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("EQUINAV_OUT")) return env;
  return "out";
}

inline std::vector<double> parse_sigmas(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

struct BuiltWorld {
  World world;
  std::string world_id;
};

inline BuiltWorld make_world(const PipelineContext& ctx,
                             std::optional<std::uint64_t> seed_override = {}) {
  const std::uint64_t wseed = seed_override.value_or(
      std::uint64_t(config_int(ctx.cfg, "world.seed", 101)));
  if (ctx.platform == Platform::kFlying) {
    const int gates = int(config_int(ctx.cfg, "world.gates", 10));
    return {generate_gate_course(wseed, gates),
            "air:" + std::to_string(wseed)};
  }
  const int n = int(config_int(ctx.cfg, "world.waypoints", 12));
  const double c = config_double(ctx.cfg, "world.curvature", 1.0);
  return {generate_track(wseed, n, c), "ground:" + std::to_string(wseed)};
}

inline std::vector<std::string> side_viewpoints(const CameraRig& rig) {
  std::vector<std::string> out;
  for (std::size_t v = 1; v < rig.offsets.size(); ++v)
    out.push_back(rig.offsets[v].id);
  return out;
}

inline ReprModel<float> make_model_for(const PipelineContext& ctx,
                                       const CameraRig& rig) {
  return make_repr_model<float>(
      side_viewpoints(rig), 48, 64,
      config_double(ctx.cfg, "repr.dropout", 0.5),
      int(config_int(ctx.cfg, "repr.map_hidden", 128)));
}

// --- Pipeline stages, all skip-if-present unless force ---------------------

inline LoadedDataset ensure_dataset(const PipelineContext& ctx,
                                    const BuiltWorld& bw) {
  const std::filesystem::path dir = ctx.out / "dataset";
  if (!ctx.force && std::filesystem::exists(dir / "samples.jsonl")) {
    LoadedDataset ld = load_dataset(dir);
    require(ld.world_id == bw.world_id,
            "existing dataset was collected on a different world; use "
            "--force to overwrite");
    return ld;
  }
  const CameraRig rig = rig_for(ctx.platform);
  Dataset ds = collect_dataset(
      bw.world, rig, int(config_int(ctx.cfg, "collect.episodes", 20)),
      int(config_int(ctx.cfg, "collect.steps", 100)),
      split_seed(ctx.seed, 1),
      config_double(ctx.cfg, "collect.lat_jitter", 0.5),
      config_double(ctx.cfg, "collect.yaw_jitter", 0.2));
  save_dataset(dir, ds, bw.world_id);
  append_manifest(ctx.out, {"dataset/samples.jsonl", "dataset",
                            ctx.cfg_hash_hex()});
  return {std::move(ds), bw.world_id};
}

inline ReprModel<float> ensure_representation(const PipelineContext& ctx,
                                              const BuiltWorld& bw) {
  const CameraRig rig = rig_for(ctx.platform);
  ReprModel<float> model = make_model_for(ctx, rig);
  const std::filesystem::path ckpt = ctx.out / "repr.ckpt";
  if (!ctx.force && std::filesystem::exists(ckpt)) {
    load_checkpoint(ckpt, model.params());
    return model;
  }
  const LoadedDataset ld = ensure_dataset(ctx, bw);
  auto rng = make_rng(split_seed(ctx.seed, 2));
  model.init(rng);

  ReprTrainConfig<float> cfg;
  cfg.epochs = int(config_int(ctx.cfg, "repr.epochs", 30));
  cfg.batch_size = int(config_int(ctx.cfg, "repr.batch", 64));
  cfg.patience = int(config_int(ctx.cfg, "repr.patience", 5));
  cfg.adam.lr = float(config_double(ctx.cfg, "repr.lr", 1e-4));
  cfg.weights.rc = float(config_double(ctx.cfg, "repr.lambda_rc", 1.0));
  cfg.weights.eq = float(config_double(ctx.cfg, "repr.lambda_eq", 10.0));
  cfg.weights.eq_rc = float(config_double(ctx.cfg, "repr.lambda_eq_rc", 1.0));
  cfg.seed = split_seed(ctx.seed, 2);
  const auto res = train_representation(model, to_tuple_set(ld.data), cfg);

  std::ofstream curve(ctx.out / "repr_curve.csv");
  curve << "epoch,split,loss_rc,loss_eq,loss_eq_rc,loss_total\n";
  for (const auto& r : res.curve)
    curve << r.epoch << ',' << r.split << ',' << r.rc << ',' << r.eq << ','
          << r.eq_rc << ',' << r.total << "\n";
  save_checkpoint(ckpt, model.params());
  append_manifest(ctx.out, {"repr.ckpt", "checkpoint", ctx.cfg_hash_hex()});
  append_manifest(ctx.out,
                  {"repr_curve.csv", "curve", ctx.cfg_hash_hex()});
  return model;
}

inline AugmentContext make_augment_context(const PipelineContext& ctx,
                                           const ReprModel<float>& model) {
  AugmentContext a;
  a.model = &model;
  a.profile = profile_for(ctx.platform);
  a.sigmas = parse_sigmas(config_str(ctx.cfg, "noise.sigmas", "0.1"));
  a.noise_seed = split_seed(ctx.seed, 6);
  a.random_map_fn =
      random_map(side_viewpoints(rig_for(ctx.platform)),
                 model.encoder().embed_dim(),
                 int(config_int(ctx.cfg, "repr.map_hidden", 128)),
                 split_seed(ctx.seed, 7));
  return a;
}

inline PolicyTrainConfig<float> policy_train_config(
    const PipelineContext& ctx) {
  PolicyTrainConfig<float> cfg;
  cfg.epochs = int(config_int(ctx.cfg, "policy.epochs", 30));
  cfg.batch_size = int(config_int(ctx.cfg, "policy.batch", 64));
  cfg.adam.lr = float(config_double(ctx.cfg, "policy.lr", 1e-4));
  cfg.seed = split_seed(ctx.seed, 3);
  return cfg;
}

inline int action_dim_for(Platform p) {
  return p == Platform::kFlying ? 2 : 1;
}

// Behavioral-cloning stage: embeddings from the chosen strategy, policy
// trained from scratch.
inline Policy<float> train_initial_policy(const PipelineContext& ctx,
                                          const ReprModel<float>& model,
                                          Strategy strategy,
                                          const Dataset& ds,
                                          EmbeddingDataset& agg_out) {
  const AugmentContext actx = make_augment_context(ctx, model);
  agg_out = build_for_strategy(ds, strategy, actx);
  Policy<float> pi(model.encoder().embed_dim(), action_dim_for(ctx.platform));
  auto rng = make_rng(split_seed(ctx.seed, 4));
  pi.init(rng);
  train_policy(pi, agg_out, policy_train_config(ctx));
  return pi;
}

struct EvalSummary {
  double mean_cte = 0;
  int interventions = 0;
  double elapsed_s = 0;
  double autonomy_pct = 0;
};

inline EvalSummary evaluate_policy(const Policy<float>& pi,
                                   const ReprModel<float>& model,
                                   const World& world, const CameraRig& rig,
                                   int episodes, int steps,
                                   std::uint64_t seed) {
  EvalSummary s;
  double cte_sum = 0;
  long cte_n = 0;
  for (int e = 0; e < episodes; ++e) {
    auto rng = make_rng(split_seed(seed, 0xe7a1 + std::uint64_t(e)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    VehicleState s0;
    if (std::holds_alternative<Track>(world)) {
      // Offset starts make the evaluation probe recovery ability rather
      // than just steady-state lane keeping.
      const Track& t = std::get<Track>(world);
      const double lat = (u01(rng) - 0.5) * 1.2;   // +-0.6 m
      const double dyaw = (u01(rng) - 0.5) * 0.3;  // +-0.15 rad
      s0 = start_state(t, u01(rng) * t.centerline().length(), lat, dyaw);
    } else {
      const GateCourse& c = std::get<GateCourse>(world);
      s0 = start_state(c, u01(rng) * 0.3 * c.reference_path().length());
    }
    const TrajectoryLog log =
        rollout(pi, model.encoder(), world, rig, s0, steps);
    for (const auto& r : log.rows)
      if (!r.expert_in_control) {
        cte_sum += r.cte;
        ++cte_n;
      }
    s.interventions += log.interventions;
    s.elapsed_s += log.elapsed_s;
  }
  s.mean_cte = cte_n > 0 ? cte_sum / double(cte_n)
                         : std::numeric_limits<double>::quiet_NaN();
  s.autonomy_pct = metric_autonomy(s.interventions, s.elapsed_s);
  return s;
}

inline ResultRow make_result_row(const std::string& strategy, int iteration,
                                 std::uint64_t seed, const EvalSummary& s,
                                 const std::string& world_id, bool ood) {
  ResultRow r;
  r.strategy = strategy;
  r.iteration = iteration;
  r.seed = seed;
  r.mean_cte_m = s.mean_cte;
  r.interventions = s.interventions;
  r.elapsed_s = s.elapsed_s;
  r.autonomy_pct = s.autonomy_pct;
  r.world_id = world_id;
  r.ood = ood;
  return r;
}

// Full imitation pipeline for one (strategy, seed): behavioral cloning,
// then DAgger iterations, evaluating after every stage. iteration 0 is the
// pure-BC policy.
inline std::vector<ResultRow> run_pipeline(const PipelineContext& ctx,
                                           const ReprModel<float>& model,
                                           Strategy strategy, int iterations,
                                           const BuiltWorld& bw,
                                           const Dataset& ds) {
  const CameraRig rig = rig_for(ctx.platform);
  const AugmentContext actx = make_augment_context(ctx, model);
  const int eval_eps = int(config_int(ctx.cfg, "eval.episodes", 3));
  const int eval_steps = int(config_int(ctx.cfg, "eval.steps", 400));

  EmbeddingDataset agg;
  Policy<float> pi = train_initial_policy(ctx, model, strategy, ds, agg);

  std::vector<ResultRow> rows;
  EvalSummary s = evaluate_policy(pi, model, bw.world, rig, eval_eps,
                                  eval_steps, split_seed(ctx.seed, 5));
  rows.push_back(make_result_row(to_string(strategy), 0, ctx.seed, s,
                                 bw.world_id, false));

  DaggerConfig dcfg;
  dcfg.episodes = int(config_int(ctx.cfg, "dagger.episodes", 4));
  dcfg.steps_per_episode = int(config_int(ctx.cfg, "dagger.steps", 200));
  dcfg.train = policy_train_config(ctx);
  for (int it = 1; it <= iterations; ++it) {
    dcfg.seed = split_seed(ctx.seed, 100 + std::uint64_t(it));
    dagger_iterate(pi, agg, bw.world, rig, strategy, actx, dcfg);
    s = evaluate_policy(pi, model, bw.world, rig, eval_eps, eval_steps,
                        split_seed(ctx.seed, 200 + std::uint64_t(it)));
    rows.push_back(make_result_row(to_string(strategy), it, ctx.seed, s,
                                   bw.world_id, false));
  }
  return rows;
}

}  // namespace equinav
