#pragma once

#include <CLI11.hpp>

#include "equinav/cli/pipeline.hpp"

namespace equinav {

namespace cli_detail {

struct CommonOpts {
  std::string config_path;
  std::string out = default_out_dir().string();
  std::uint64_t seed = 0;
  std::string platform = "ground-sim";
  std::string strategy = "equivariant";
  double sigma = -1.0;  // <0 means: use the config's sigma list
  int iterations = 3;
  int episodes = -1;  // <0 means: use the config value
  bool force = false;
};

inline void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (key=value)");
  cmd->add_option("--out", o.out,
                  "output directory (default: $EQUINAV_OUT or ./out)");
  cmd->add_option("--seed", o.seed, "master random seed");
  cmd->add_option("--platform", o.platform, "vehicle platform")
      ->check(CLI::IsMember({"ground-sim", "flying"}));
  cmd->add_option("--strategy", o.strategy, "augmentation strategy")
      ->check(CLI::IsMember({"center", "allcams", "equivariant", "noise",
                             "random-map", "det-map"}));
  cmd->add_option("--sigma", o.sigma, "pixel-noise sigma override");
  cmd->add_option("--iterations", o.iterations, "DAgger iterations");
  cmd->add_option("--episodes", o.episodes, "episode count override");
  cmd->add_flag("--force", o.force, "recompute even if outputs exist");
}

inline PipelineContext make_context(const CommonOpts& o) {
  PipelineContext ctx;
  if (!o.config_path.empty()) ctx.cfg = load_config(o.config_path);
  validate_keys(ctx.cfg, known_config_keys());
  if (o.sigma >= 0.0) ctx.cfg["noise.sigmas"] = std::to_string(o.sigma);
  if (o.episodes >= 0) {
    ctx.cfg["collect.episodes"] = std::to_string(o.episodes);
    ctx.cfg["eval.episodes"] = std::to_string(o.episodes);
    ctx.cfg["dagger.episodes"] = std::to_string(o.episodes);
  }
  ctx.out = o.out;
  ctx.platform = platform_from_string(o.platform);
  ctx.seed = o.seed;
  ctx.force = o.force;
  std::filesystem::create_directories(ctx.out);
  return ctx;
}

inline std::filesystem::path policy_ckpt_path(const PipelineContext& ctx,
                                              const std::string& strategy) {
  return ctx.out / ("policy-" + strategy + "-seed" +
                    std::to_string(ctx.seed) + ".ckpt");
}

inline void merge_rows(std::vector<ResultRow>& into,
                       const std::vector<ResultRow>& extra) {
  std::set<std::tuple<std::string, int, std::uint64_t, std::string, bool>>
      seen;
  for (const auto& r : into) seen.insert(r.key());
  for (const auto& r : extra)
    if (!seen.count(r.key())) {
      into.push_back(r);
      seen.insert(r.key());
    }
}

inline bool have_rows(const std::vector<ResultRow>& rows,
                      const std::string& strategy, std::uint64_t seed,
                      int iterations, const std::string& world_id,
                      bool ood) {
  std::set<int> found;
  for (const auto& r : rows)
    if (r.strategy == strategy && r.seed == seed && r.world_id == world_id &&
        r.ood == ood)
      found.insert(r.iteration);
  for (int it = 0; it <= iterations; ++it)
    if (!found.count(it)) return false;
  return true;
}

// Runs BC + DAgger for one strategy/seed pair and persists the results and
// the final policy.
inline void run_and_record(PipelineContext ctx, Strategy strategy,
                           int iterations) {
  const BuiltWorld bw = make_world(ctx);
  std::vector<ResultRow> rows = read_results_csv(ctx.out / "results.csv");
  if (!ctx.force && have_rows(rows, to_string(strategy), ctx.seed, iterations,
                              bw.world_id, false))
    return;
  ReprModel<float> model = ensure_representation(ctx, bw);
  const LoadedDataset ld = ensure_dataset(ctx, bw);
  const std::vector<ResultRow> fresh =
      run_pipeline(ctx, model, strategy, iterations, bw, ld.data);
  merge_rows(rows, fresh);
  write_results_csv(rows, ctx.out / "results.csv");
  append_manifest(ctx.out, {"results.csv", "results", ctx.cfg_hash_hex()});
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
  using namespace cli_detail;
  CLI::App app{"Equivariant-augmentation imitation-learning workbench"};
  app.require_subcommand(1);

  CommonOpts o;
  auto* collect = app.add_subcommand(
      "collect", "record an expert demonstration dataset");
  auto* train_repr = app.add_subcommand(
      "train-repr", "train the equivariant representation");
  auto* train_pol = app.add_subcommand(
      "train-policy", "behavioral cloning on augmented embeddings");
  auto* dagger = app.add_subcommand(
      "dagger", "run DAgger iterations and evaluate each one");
  auto* eval = app.add_subcommand("eval", "evaluate a trained policy");
  auto* matrix = app.add_subcommand(
      "matrix", "run every main strategy across seeds");
  auto* ablate = app.add_subcommand(
      "ablate", "run the map ablations (random-map, det-map)");
  auto* plot = app.add_subcommand("plot", "render report plots");
  for (CLI::App* c :
       {collect, train_repr, train_pol, dagger, eval, matrix, ablate, plot})
    add_common(c, o);

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineContext ctx = make_context(o);
    const Strategy strategy = strategy_from_string(o.strategy);

    if (collect->parsed()) {
      ensure_dataset(ctx, make_world(ctx));
    } else if (train_repr->parsed()) {
      ensure_representation(ctx, make_world(ctx));
    } else if (train_pol->parsed()) {
      const BuiltWorld bw = make_world(ctx);
      const std::filesystem::path ckpt = policy_ckpt_path(ctx, o.strategy);
      if (ctx.force || !std::filesystem::exists(ckpt)) {
        ReprModel<float> model = ensure_representation(ctx, bw);
        const LoadedDataset ld = ensure_dataset(ctx, bw);
        EmbeddingDataset agg;
        Policy<float> pi =
            train_initial_policy(ctx, model, strategy, ld.data, agg);
        save_checkpoint(ckpt, pi.params());
        append_manifest(ctx.out, {ckpt.filename().string(), "checkpoint",
                                  ctx.cfg_hash_hex()});
      }
    } else if (dagger->parsed()) {
      run_and_record(ctx, strategy, o.iterations);
    } else if (eval->parsed()) {
      const BuiltWorld bw = make_world(ctx);
      ReprModel<float> model = ensure_representation(ctx, bw);
      const std::filesystem::path ckpt = policy_ckpt_path(ctx, o.strategy);
      require(std::filesystem::exists(ckpt),
              "no trained policy at " + ckpt.string() +
                  "; run train-policy first");
      Policy<float> pi(model.encoder().embed_dim(),
                       action_dim_for(ctx.platform));
      load_checkpoint(ckpt, pi.params());
      const EvalSummary s = evaluate_policy(
          pi, model, bw.world, rig_for(ctx.platform),
          int(config_int(ctx.cfg, "eval.episodes", 3)),
          int(config_int(ctx.cfg, "eval.steps", 400)),
          split_seed(ctx.seed, 5));
      std::vector<ResultRow> rows = read_results_csv(ctx.out / "results.csv");
      merge_rows(rows, {make_result_row(o.strategy, 0, ctx.seed, s,
                                        bw.world_id, false)});
      write_results_csv(rows, ctx.out / "results.csv");
      std::printf("autonomy %.2f%%, mean CTE %.3f m, %d interventions\n",
                  s.autonomy_pct, s.mean_cte, s.interventions);
    } else if (matrix->parsed()) {
      for (Strategy s : {Strategy::kCenter, Strategy::kAllcams,
                         Strategy::kEquivariant, Strategy::kNoise})
        run_and_record(ctx, s, o.iterations);
    } else if (ablate->parsed()) {
      for (Strategy s : {Strategy::kRandomMap, Strategy::kDetMap})
        run_and_record(ctx, s, o.iterations);
    } else if (plot->parsed()) {
      const auto rows = read_results_csv(ctx.out / "results.csv");
      require(!rows.empty(), "no results.csv in " + ctx.out.string());
      emit_report(rows, ctx.out);
    }
    validate_manifest(ctx.out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace equinav
