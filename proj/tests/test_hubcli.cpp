#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "equinav/cli/app.hpp"

using namespace equinav;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"equinav"};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_cli(int(argv.size()), argv.data());
}

}  // namespace

TEST(Checkpoint, BitExactRoundTrip) {
  const fs::path dir = temp_dir("equinav_ckpt");
  Dense<float> a("a", 7, 5), b("b", 3, 4);
  std::mt19937_64 rng(3);
  a.init(rng);
  b.init(rng);
  b.b = Mat<float>::Constant(4, 1, 0.125f);
  std::vector<ParamRef<float>> params;
  a.collect(params);
  b.collect(params);
  save_checkpoint(dir / "m.ckpt", params);

  Dense<float> a2("a", 7, 5), b2("b", 3, 4);
  std::vector<ParamRef<float>> params2;
  a2.collect(params2);
  b2.collect(params2);
  load_checkpoint(dir / "m.ckpt", params2);
  EXPECT_TRUE(a.W == a2.W);
  EXPECT_TRUE(a.b == a2.b);
  EXPECT_TRUE(b.W == b2.W);
  EXPECT_TRUE(b.b == b2.b);
  EXPECT_EQ(param_hash(params), param_hash(params2));
  // Atomic write: no stray temporary left behind.
  EXPECT_FALSE(fs::exists(dir / "m.ckpt.tmp"));
}

TEST(Checkpoint, MismatchesAreErrors) {
  const fs::path dir = temp_dir("equinav_ckpt_bad");
  Dense<float> a("a", 4, 4);
  save_checkpoint(dir / "m.ckpt", a.params());

  Dense<float> renamed("other", 4, 4);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", renamed.params()),
               EquinavError);
  Dense<float> reshaped("a", 4, 5);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", reshaped.params()),
               EquinavError);
  Dense<float> extra("a", 4, 4);
  std::vector<ParamRef<float>> too_many;
  extra.collect(too_many);
  extra.collect(too_many);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", too_many), EquinavError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt", a.params()),
               EquinavError);
}

TEST(Config, ParseSectionsCommentsAndTypes) {
  const ConfigMap cfg = parse_config_text(
      "# a comment\n"
      "top = 3\n"
      "[repr]\n"
      "epochs = 30  # trailing comment\n"
      "lr = 1e-4\n"
      "[eval]\n"
      "episodes = 5\n");
  EXPECT_EQ(config_int(cfg, "top", 0), 3);
  EXPECT_EQ(config_int(cfg, "repr.epochs", 0), 30);
  EXPECT_DOUBLE_EQ(config_double(cfg, "repr.lr", 0), 1e-4);
  EXPECT_EQ(config_int(cfg, "eval.episodes", 0), 5);
  EXPECT_EQ(config_int(cfg, "absent", 42), 42);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config_text("novalue\n"), EquinavError);
  EXPECT_THROW(parse_config_text("[unclosed\nk = v\n"), EquinavError);
  EXPECT_THROW(parse_config_text("a = 1\na = 2\n"), EquinavError);
  const ConfigMap bad = parse_config_text("repr.epochs = many\n");
  EXPECT_THROW(config_int(bad, "repr.epochs", 0), EquinavError);
  EXPECT_THROW(validate_keys(parse_config_text("repr.epochz = 3\n"),
                             known_config_keys()),
               EquinavError);
  EXPECT_NO_THROW(validate_keys(parse_config_text("repr.epochs = 3\n"),
                                known_config_keys()));
}

TEST(Config, HashIsStableAndValueSensitive) {
  const ConfigMap a = parse_config_text("x = 1\ny = 2\n");
  const ConfigMap b = parse_config_text("y = 2\nx = 1\n");  // same content
  const ConfigMap c = parse_config_text("x = 1\ny = 3\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Manifest, RoundTripAndValidation) {
  const fs::path dir = temp_dir("equinav_manifest");
  std::ofstream(dir / "x.ckpt") << "payload";
  append_manifest(dir, {"x.ckpt", "checkpoint", "abc123"});
  append_manifest(dir, {"results.csv", "results", "abc123"});
  std::ofstream(dir / "results.csv") << "header\n";

  const auto entries = read_manifest(dir);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].file, "x.ckpt");
  EXPECT_EQ(entries[0].kind, "checkpoint");
  EXPECT_EQ(entries[0].config_hash, "abc123");
  EXPECT_NO_THROW(validate_manifest(dir));

  // Tampering: the error must name the missing file.
  fs::remove(dir / "x.ckpt");
  try {
    validate_manifest(dir);
    FAIL() << "expected validation failure";
  } catch (const EquinavError& e) {
    EXPECT_NE(std::string(e.what()).find("x.ckpt"), std::string::npos);
  }
}

TEST(Manifest, MalformedLineIsAnError) {
  const fs::path dir = temp_dir("equinav_manifest_bad");
  std::ofstream(dir / "manifest.jsonl") << "{not json\n";
  EXPECT_THROW(read_manifest(dir), EquinavError);
}

TEST(DatasetIo, RoundTripPreservesImagesAndActions) {
  const fs::path dir = temp_dir("equinav_dataset_io");
  const Track track = generate_track(3, 12, 1.0);
  const World world = track;
  const Dataset ds = collect_dataset(world, ground_rig(), 2, 4, 11);
  save_dataset(dir, ds, "ground:3");

  const LoadedDataset back = load_dataset(dir);
  EXPECT_EQ(back.world_id, "ground:3");
  ASSERT_EQ(back.data.samples.size(), ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    EXPECT_TRUE(back.data.samples[i].images[0] == ds.samples[i].images[0]);
    EXPECT_TRUE(back.data.samples[i].images[2] == ds.samples[i].images[2]);
    EXPECT_EQ(back.data.samples[i].action, ds.samples[i].action);
    EXPECT_NEAR(back.data.samples[i].state.yaw, ds.samples[i].state.yaw,
                1e-12);
  }
}

TEST(Cli, CollectIsIdempotentAndForceRecollects) {
  const fs::path dir = temp_dir("equinav_cli_collect");
  const fs::path cfg = dir / "cfg.ini";
  std::ofstream(cfg) << "[collect]\nepisodes = 1\nsteps = 5\n";
  const std::string out = (dir / "run").string();

  ASSERT_EQ(cli({"collect", "--config", cfg.string().c_str(), "--out",
                 out.c_str(), "--seed", "3"}),
            0);
  const fs::path samples = dir / "run" / "dataset" / "samples.jsonl";
  ASSERT_TRUE(fs::exists(samples));
  const auto t0 = fs::last_write_time(samples);

  // Second run skips the work entirely.
  ASSERT_EQ(cli({"collect", "--config", cfg.string().c_str(), "--out",
                 out.c_str(), "--seed", "3"}),
            0);
  EXPECT_EQ(fs::last_write_time(samples), t0);

  ASSERT_EQ(cli({"collect", "--config", cfg.string().c_str(), "--out",
                 out.c_str(), "--seed", "3", "--force"}),
            0);
  EXPECT_GE(fs::last_write_time(samples), t0);
}

TEST(Cli, UnknownConfigKeyFailsCleanly) {
  const fs::path dir = temp_dir("equinav_cli_badcfg");
  const fs::path cfg = dir / "cfg.ini";
  std::ofstream(cfg) << "[collect]\nepizodes = 1\n";
  EXPECT_EQ(cli({"collect", "--config", cfg.string().c_str(), "--out",
                 (dir / "run").string().c_str()}),
            1);
}

TEST(Cli, EnvVarSuppliesDefaultOutDir) {
  const fs::path dir = temp_dir("equinav_cli_env");
  setenv("EQUINAV_OUT", dir.string().c_str(), 1);
  EXPECT_EQ(default_out_dir(), dir);
  unsetenv("EQUINAV_OUT");
  EXPECT_EQ(default_out_dir(), fs::path("out"));
}

TEST(Cli, PlotWithoutResultsFails) {
  const fs::path dir = temp_dir("equinav_cli_plot");
  EXPECT_EQ(cli({"plot", "--out", dir.string().c_str()}), 1);
}
