#include <gtest/gtest.h>

#include <random>

#include "equinav/nn/gradcheck.hpp"
#include "equinav/repr/train.hpp"

using namespace equinav;

namespace {

template <typename T>
Mat<T> random_mat(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                  double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Mat<T> m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = T(dist(rng));
  return m;
}

// Element-by-element loss oracle, written without Eigen reductions.
double naive_pair_loss(const std::vector<Mat<double>>& a,
                       const std::vector<Mat<double>>& b) {
  double total = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double s = 0;
    for (Eigen::Index c = 0; c < a[j].cols(); ++c)
      for (Eigen::Index r = 0; r < a[j].rows(); ++r) {
        const double d = a[j](r, c) - b[j](r, c);
        s += d * d;
      }
    total += s / double(a[j].cols());
  }
  return total;
}

ViewBatch<double> random_batch(const std::vector<std::string>& views,
                               Eigen::Index pixels, Eigen::Index B,
                               std::mt19937_64& rng) {
  ViewBatch<double> vb;
  vb.viewpoints = views;
  for (std::size_t v = 0; v < views.size(); ++v)
    vb.images.push_back(random_mat<double>(pixels, B, rng, 0.4));
  return vb;
}

}  // namespace

TEST(Losses, HandValues) {
  // Single pair in embedding space: mapped (2,0) vs target (0,1) -> 5.
  Mat<double> p(2, 1), t(2, 1);
  p << 2, 0;
  t << 0, 1;
  EXPECT_DOUBLE_EQ(loss_eq<double>({p}, {t}), 5.0);

  // 4-pixel reconstruction, all zeros against all ones -> 4.
  Mat<double> rec = Mat<double>::Zero(4, 1);
  Mat<double> img = Mat<double>::Ones(4, 1);
  EXPECT_DOUBLE_EQ(loss_rc<double>({rec}, {img}), 4.0);
}

TEST(Losses, MatchNaiveDoubleLoopOracle) {
  std::mt19937_64 rng(3);
  std::vector<Mat<double>> a, b;
  for (int j = 0; j < 3; ++j) {
    a.push_back(random_mat<double>(17, 6, rng));
    b.push_back(random_mat<double>(17, 6, rng));
  }
  EXPECT_NEAR(loss_rc(a, b), naive_pair_loss(a, b), 1e-6);
  EXPECT_NEAR(loss_eq(a, b), naive_pair_loss(a, b), 1e-6);
  EXPECT_NEAR(loss_eq_rc(a, b), naive_pair_loss(a, b), 1e-6);
}

TEST(Losses, BatchDuplicationInvariance) {
  // Mean reduction: duplicating every sample leaves the loss unchanged.
  std::mt19937_64 rng(5);
  Mat<double> a = random_mat<double>(9, 4, rng);
  Mat<double> b = random_mat<double>(9, 4, rng);
  Mat<double> a2(9, 8), b2(9, 8);
  a2 << a, a;
  b2 << b, b;
  EXPECT_NEAR(loss_rc<double>({a}, {b}), loss_rc<double>({a2}, {b2}), 1e-9);
}

TEST(Losses, WeightCombinations) {
  auto model = make_mini_repr_model<double>({"left", "right"});
  std::mt19937_64 rng(7);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left", "right"},
                                      model.encoder().input_dim(), 3, rng);
  LossValues zero = model.losses(vb, LossWeights<double>{0, 0, 0});
  EXPECT_EQ(zero.total, 0.0);
  LossValues rc_only = model.losses(vb, LossWeights<double>{1, 0, 0});
  EXPECT_DOUBLE_EQ(rc_only.total, rc_only.rc);
  LossValues full = model.losses(vb, LossWeights<double>{1, 10, 1});
  EXPECT_NEAR(full.total, full.rc + 10 * full.eq + full.eq_rc, 1e-9);
}

TEST(Losses, ForwardAndBackwardAgreeOnValues) {
  auto model = make_mini_repr_model<double>({"left", "right"});
  std::mt19937_64 rng(11);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left", "right"},
                                      model.encoder().input_dim(), 4, rng);
  const LossWeights<double> w{1, 10, 1};
  LossValues f = model.losses(vb, w);
  zero_grads(model.params());
  LossValues fb = model.losses_backward(vb, w);
  EXPECT_NEAR(f.rc, fb.rc, 1e-10);
  EXPECT_NEAR(f.eq, fb.eq, 1e-10);
  EXPECT_NEAR(f.eq_rc, fb.eq_rc, 1e-10);
  EXPECT_NEAR(f.total, fb.total, 1e-10);
}

TEST(Losses, FiniteDifferenceTotalLoss) {
  auto model = make_mini_repr_model<double>({"left", "right"});
  std::mt19937_64 rng(13);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left", "right"},
                                      model.encoder().input_dim(), 2, rng);
  const LossWeights<double> w{1, 10, 1};
  auto params = model.params();
  auto value = [&] { return model.losses(vb, w).total; };
  auto fb = [&] { model.losses_backward(vb, w); };
  auto rep = finite_diff_check<double>(value, fb, params, 1e-4, 1e-4, 60, 2);
  EXPECT_TRUE(rep.pass) << rep.worst_param << " rel " << rep.max_rel_error;
}

TEST(Losses, FiniteDifferencePerTerm) {
  auto model = make_mini_repr_model<double>({"left"});
  std::mt19937_64 rng(17);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left"},
                                      model.encoder().input_dim(), 2, rng);
  struct Term {
    LossWeights<double> w;
    const char* name;
  };
  const Term terms[] = {{{1, 0, 0}, "rc"}, {{0, 1, 0}, "eq"},
                        {{0, 0, 1}, "eq_rc"}};
  for (const auto& t : terms) {
    auto params = model.params();
    auto value = [&] { return model.losses(vb, t.w).total; };
    auto fb = [&] { model.losses_backward(vb, t.w); };
    auto rep = finite_diff_check<double>(value, fb, params, 1e-4, 1e-4, 40, 3);
    EXPECT_TRUE(rep.pass) << t.name << ": " << rep.worst_param << " rel "
                          << rep.max_rel_error;
  }
}

TEST(Losses, NonFiniteInputNamesBatchIndex) {
  auto model = make_mini_repr_model<double>({"left"});
  std::mt19937_64 rng(19);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left"},
                                      model.encoder().input_dim(), 3, rng);
  vb.images[1](5, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    model.losses(vb, LossWeights<double>{1, 10, 1});
    FAIL() << "expected a non-finite loss error";
  } catch (const EquinavError& e) {
    EXPECT_NE(std::string(e.what()).find("batch index 2"), std::string::npos)
        << e.what();
  }
}

TEST(EquivarianceRatio, MatchesNaivePerSampleComputation) {
  auto model = make_mini_repr_model<double>({"left", "right"});
  std::mt19937_64 rng(23);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left", "right"},
                                      model.encoder().input_dim(), 5, rng);

  std::vector<double> ratios;
  for (std::size_t j = 1; j < vb.images.size(); ++j)
    for (Eigen::Index i = 0; i < 5; ++i) {
      Vec<double> zc = encode(model.encoder(), Vec<double>(vb.images[0].col(i)));
      Vec<double> zj = encode(model.encoder(), Vec<double>(vb.images[j].col(i)));
      Vec<double> p = map_embed(model.map_for(vb.viewpoints[j]), zc);
      const double denom = (zj - zc).squaredNorm();
      if (denom < 1e-12) continue;
      ratios.push_back((zj - p).squaredNorm() / denom);
    }
  std::sort(ratios.begin(), ratios.end());
  const std::size_t n = ratios.size();
  const double want = n % 2 ? ratios[n / 2]
                            : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  EXPECT_NEAR(model.equivariance_ratio(vb), want, 1e-9);
}

TEST(EquivarianceRatio, SkipsDegenerateDenominators) {
  auto model = make_mini_repr_model<double>({"left"});
  std::mt19937_64 rng(29);
  model.init(rng);
  ViewBatch<double> vb = random_batch({"center", "left"},
                                      model.encoder().input_dim(), 3, rng);
  vb.images[1].col(0) = vb.images[0].col(0);  // z_j == z_c, denominator 0
  EXPECT_NO_THROW(model.equivariance_ratio(vb));

  ViewBatch<double> all_same = vb;
  all_same.images[1] = all_same.images[0];
  EXPECT_THROW(model.equivariance_ratio(all_same), EquinavError);
}

TEST(Training, LossDecreasesAndCurveIsWellFormed) {
  auto model = make_mini_repr_model<float>({"left", "right"});
  std::mt19937_64 rng(31);
  model.init(rng);

  TupleSet<float> data;
  data.viewpoints = {"center", "left", "right"};
  const int N = 96;
  for (int v = 0; v < 3; ++v)
    data.images.push_back(
        random_mat<float>(model.encoder().input_dim(), N, rng, 0.3));
  for (int i = 0; i < N; ++i) data.episode.push_back(i / 12);  // 8 episodes

  ReprTrainConfig<float> cfg;
  cfg.epochs = 8;
  cfg.batch_size = 16;
  cfg.adam.lr = 1e-3f;
  cfg.seed = 77;
  auto res = train_representation(model, data, cfg);

  ASSERT_EQ(res.curve.size(), std::size_t(2 * res.epochs_run));
  EXPECT_EQ(res.curve[0].split, "train");
  EXPECT_EQ(res.curve[1].split, "val");
  const double first_train = res.curve[0].total;
  const double last_train = res.curve[2 * (res.epochs_run - 1)].total;
  EXPECT_LT(last_train, first_train);
  EXPECT_LE(res.best_epoch, res.epochs_run);
  EXPECT_TRUE(std::isfinite(res.best_val));
}

TEST(Training, DeterministicForFixedSeed) {
  TupleSet<float> data;
  data.viewpoints = {"center", "left"};
  std::mt19937_64 drng(37);
  const int N = 40;
  auto proto = make_mini_repr_model<float>({"left"});
  for (int v = 0; v < 2; ++v)
    data.images.push_back(
        random_mat<float>(proto.encoder().input_dim(), N, drng, 0.3));
  for (int i = 0; i < N; ++i) data.episode.push_back(i / 10);

  auto run = [&] {
    auto model = make_mini_repr_model<float>({"left"});
    std::mt19937_64 rng(41);
    model.init(rng);
    ReprTrainConfig<float> cfg;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.seed = 5;
    return train_representation(model, data, cfg);
  };
  auto a = run(), b = run();
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i)
    EXPECT_EQ(a.curve[i].total, b.curve[i].total);
}

TEST(Training, EarlyStopRespectsPatience) {
  // A zero learning rate keeps validation flat, so training must stop after
  // exactly 1 + patience epochs.
  auto model = make_mini_repr_model<float>({"left"});
  std::mt19937_64 rng(43);
  model.init(rng);
  TupleSet<float> data;
  data.viewpoints = {"center", "left"};
  const int N = 30;
  for (int v = 0; v < 2; ++v)
    data.images.push_back(
        random_mat<float>(model.encoder().input_dim(), N, rng, 0.3));
  for (int i = 0; i < N; ++i) data.episode.push_back(i / 10);

  ReprTrainConfig<float> cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.patience = 3;
  cfg.adam.lr = 0.0f;
  cfg.seed = 9;
  auto res = train_representation(model, data, cfg);
  EXPECT_EQ(res.epochs_run, 1 + cfg.patience);
  EXPECT_EQ(res.best_epoch, 1);
}
