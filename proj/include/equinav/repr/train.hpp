#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "equinav/repr/losses.hpp"

namespace equinav {

// A full dataset of synchronized multi-viewpoint tuples. Columns are
// samples; episode[i] records which expert episode column i came from so the
// validation split never shares an episode with training.
template <typename T>
struct TupleSet {
  std::vector<std::string> viewpoints;  // center first
  std::vector<Mat<T>> images;           // pixels x N per viewpoint
  std::vector<int> episode;             // size N

  Eigen::Index size() const { return images.empty() ? 0 : images[0].cols(); }

  ViewBatch<T> gather(const std::vector<Eigen::Index>& cols) const {
    ViewBatch<T> vb;
    vb.viewpoints = viewpoints;
    vb.images.resize(images.size());
    for (std::size_t v = 0; v < images.size(); ++v) {
      vb.images[v].resize(images[v].rows(), Eigen::Index(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i)
        vb.images[v].col(Eigen::Index(i)) = images[v].col(cols[i]);
    }
    return vb;
  }
};

template <typename T>
struct ReprTrainConfig {
  int epochs = 30;
  int batch_size = 64;
  int patience = 5;  // early stop on stalled validation loss
  double val_fraction = 0.1;
  AdamConfig<T> adam{};
  LossWeights<T> weights{};
  std::uint64_t seed = 0;
};

struct CurveRow {
  int epoch;
  std::string split;  // "train" or "val"
  double rc, eq, eq_rc, total;
};

namespace repr_detail {

// Episode-level split: whole episodes go to validation.
inline void split_by_episode(const std::vector<int>& episode,
                             double val_fraction, std::uint64_t seed,
                             std::vector<Eigen::Index>& train_idx,
                             std::vector<Eigen::Index>& val_idx) {
  std::vector<int> eps(episode.begin(), episode.end());
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  auto rng = make_rng(split_seed(seed, 0x5eed));
  std::shuffle(eps.begin(), eps.end(), rng);
  std::size_t n_val = std::size_t(std::lround(val_fraction * eps.size()));
  if (n_val == 0 && eps.size() > 1) n_val = 1;
  std::vector<int> val_eps(eps.end() - long(n_val), eps.end());
  std::sort(val_eps.begin(), val_eps.end());
  for (std::size_t i = 0; i < episode.size(); ++i) {
    const bool is_val = std::binary_search(val_eps.begin(), val_eps.end(),
                                           episode[i]);
    (is_val ? val_idx : train_idx).push_back(Eigen::Index(i));
  }
}

}  // namespace repr_detail

template <typename T>
struct ReprTrainResult {
  std::vector<CurveRow> curve;
  double best_val = 0;
  int best_epoch = 0;
  int epochs_run = 0;
};

// Minibatch training with Adam, episode-level validation split, and early
// stopping; the model is left holding the best-validation parameters.
template <typename T>
ReprTrainResult<T> train_representation(ReprModel<T>& model,
                                        const TupleSet<T>& data,
                                        const ReprTrainConfig<T>& cfg) {
  require(data.size() > 0, "train_representation: empty dataset");
  std::vector<Eigen::Index> train_idx, val_idx;
  repr_detail::split_by_episode(data.episode, cfg.val_fraction, cfg.seed,
                                train_idx, val_idx);
  require(!train_idx.empty(), "train_representation: empty training split");

  auto params = model.params();
  Adam<T> opt(params, cfg.adam);
  auto rng = make_rng(split_seed(cfg.seed, 0x7ea1));

  auto eval_split = [&](const std::vector<Eigen::Index>& idx) {
    LossValues acc;
    if (idx.empty()) return acc;
    Eigen::Index n = 0;
    for (std::size_t start = 0; start < idx.size();
         start += std::size_t(cfg.batch_size)) {
      std::vector<Eigen::Index> cols(
          idx.begin() + long(start),
          idx.begin() + long(std::min(start + std::size_t(cfg.batch_size),
                                      idx.size())));
      const ViewBatch<T> vb = data.gather(cols);
      const LossValues L = model.losses(vb, cfg.weights);
      const double w = double(cols.size());
      acc.rc += L.rc * w;
      acc.eq += L.eq * w;
      acc.eq_rc += L.eq_rc * w;
      acc.total += L.total * w;
      n += Eigen::Index(cols.size());
    }
    acc.rc /= double(n);
    acc.eq /= double(n);
    acc.eq_rc /= double(n);
    acc.total /= double(n);
    return acc;
  };

  ReprTrainResult<T> res;
  std::vector<Mat<T>> best;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0, stale = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    LossValues tr;
    Eigen::Index seen = 0;
    for (std::size_t start = 0; start < train_idx.size();
         start += std::size_t(cfg.batch_size)) {
      std::vector<Eigen::Index> cols(
          train_idx.begin() + long(start),
          train_idx.begin() +
              long(std::min(start + std::size_t(cfg.batch_size),
                            train_idx.size())));
      const ViewBatch<T> vb = data.gather(cols);
      zero_grads(params);
      const LossValues L =
          model.losses_backward(vb, cfg.weights, /*train=*/true, &rng);
      opt.step(params);
      const double w = double(cols.size());
      tr.rc += L.rc * w;
      tr.eq += L.eq * w;
      tr.eq_rc += L.eq_rc * w;
      tr.total += L.total * w;
      seen += Eigen::Index(cols.size());
    }
    tr.rc /= double(seen);
    tr.eq /= double(seen);
    tr.eq_rc /= double(seen);
    tr.total /= double(seen);
    res.curve.push_back({epoch, "train", tr.rc, tr.eq, tr.eq_rc, tr.total});
    res.epochs_run = epoch;

    const bool have_val = !val_idx.empty();
    const LossValues va = have_val ? eval_split(val_idx) : tr;
    res.curve.push_back({epoch, "val", va.rc, va.eq, va.eq_rc, va.total});

    if (va.total < best_val) {
      best_val = va.total;
      best_epoch = epoch;
      stale = 0;
      best.clear();
      for (const auto& p : params) best.push_back(*p.value);
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) *params[i].value = best[i];
  res.best_val = best_val;
  res.best_epoch = best_epoch;
  return res;
}

}  // namespace equinav
