#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "equinav/core.hpp"
#include "equinav/nn/adam.hpp"
#include "equinav/nn/models.hpp"

namespace equinav {

// One training batch of synchronized multi-viewpoint images. Column i of
// every matrix shows the same vehicle state from a different camera.
// viewpoints[0] must be the center camera.
template <typename T>
struct ViewBatch {
  std::vector<std::string> viewpoints;
  std::vector<Mat<T>> images;  // pixels x B, aligned with viewpoints

  Eigen::Index batch() const { return images.empty() ? 0 : images[0].cols(); }

  void validate() const {
    require(!viewpoints.empty() && viewpoints[0] == "center",
            "view batch must start with the center viewpoint");
    require(viewpoints.size() == images.size(),
            "view batch: viewpoint/image count mismatch");
    for (const auto& m : images)
      require(m.cols() == batch() && m.rows() == images[0].rows(),
              "view batch: ragged image matrices");
  }
};

template <typename T>
struct LossWeights {
  T rc = T(1);
  T eq = T(10);
  T eq_rc = T(1);
};

struct LossValues {
  double rc = 0, eq = 0, eq_rc = 0, total = 0;
};

// Mean over batch columns of the squared column-wise difference.
template <typename T>
inline double mean_sq_diff(const Mat<T>& a, const Mat<T>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "loss: operand shape mismatch");
  require(a.cols() > 0, "loss: empty batch");
  return double((a - b).squaredNorm()) / double(a.cols());
}

// Sum over viewpoints of the per-sample reconstruction error, batch-mean.
template <typename T>
inline double loss_rc(const std::vector<Mat<T>>& reconstructions,
                      const std::vector<Mat<T>>& targets) {
  require(reconstructions.size() == targets.size(),
          "loss_rc: viewpoint count mismatch");
  double s = 0;
  for (std::size_t j = 0; j < targets.size(); ++j)
    s += mean_sq_diff(reconstructions[j], targets[j]);
  return s;
}

// Sum over non-center viewpoints of ||M_j(z_center) - z_j||^2, batch-mean.
template <typename T>
inline double loss_eq(const std::vector<Mat<T>>& mapped,
                      const std::vector<Mat<T>>& targets) {
  require(mapped.size() == targets.size(), "loss_eq: count mismatch");
  double s = 0;
  for (std::size_t j = 0; j < targets.size(); ++j)
    s += mean_sq_diff(mapped[j], targets[j]);
  return s;
}

// Sum over non-center viewpoints of ||D(M_j(z_center)) - I_j||^2, batch-mean.
template <typename T>
inline double loss_eq_rc(const std::vector<Mat<T>>& mapped_recs,
                         const std::vector<Mat<T>>& target_images) {
  return loss_eq(mapped_recs, target_images);
}

// Complete representation model: shared Siamese encoder, decoder, and one
// equivariant map per non-center viewpoint.
template <typename T>
class ReprModel {
 public:
  ReprModel(Encoder<T> enc, Decoder<T> dec,
            const std::vector<std::string>& side_viewpoints, int map_hidden)
      : enc_(std::move(enc)), dec_(std::move(dec)) {
    for (const auto& v : side_viewpoints)
      maps_.emplace_back(v, enc_.embed_dim(), map_hidden);
  }

  Encoder<T>& encoder() { return enc_; }
  const Encoder<T>& encoder() const { return enc_; }
  Decoder<T>& decoder() { return dec_; }
  const Decoder<T>& decoder() const { return dec_; }
  std::vector<EqMap<T>>& maps() { return maps_; }
  const std::vector<EqMap<T>>& maps() const { return maps_; }

  const EqMap<T>& map_for(const std::string& viewpoint) const {
    for (const auto& m : maps_)
      if (m.viewpoint() == viewpoint) return m;
    throw EquinavError("no equivariant map for viewpoint: " + viewpoint);
  }

  void init(std::mt19937_64& rng) {
    enc_.init(rng);
    dec_.init(rng);
    for (auto& m : maps_) m.init(rng);
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    enc_.collect(out);
    dec_.collect(out);
    for (auto& m : maps_) m.collect(out);
    return out;
  }

  std::vector<ParamRef<T>> encoder_params() { return enc_.params(); }

  // Forward-only loss evaluation. `train` enables encoder dropout.
  LossValues losses(const ViewBatch<T>& vb, const LossWeights<T>& w,
                    bool train = false, std::mt19937_64* rng = nullptr) const {
    vb.validate();
    check_views(vb);
    const std::size_t V = vb.images.size();
    std::vector<Mat<T>> z(V);
    for (std::size_t j = 0; j < V; ++j)
      z[j] = enc_.forward(vb.images[j], nullptr, train, rng);

    LossValues L;
    for (std::size_t j = 0; j < V; ++j)
      L.rc += mean_sq_diff(dec_.forward(z[j]), vb.images[j]);
    // With both equivariance weights at zero the map terms cannot affect
    // the total, so skip their cost (used by the reconstruction baseline).
    if (w.eq != T(0) || w.eq_rc != T(0)) {
      for (std::size_t j = 1; j < V; ++j) {
        const Mat<T> p = maps_[j - 1].forward(z[0]);
        L.eq += mean_sq_diff(p, z[j]);
        L.eq_rc += mean_sq_diff(dec_.forward(p), vb.images[j]);
      }
    }
    L.total = double(w.rc) * L.rc + double(w.eq) * L.eq +
              double(w.eq_rc) * L.eq_rc;
    check_finite(L, vb);
    return L;
  }

  // Forward + backward; gradients accumulate into the parameter buffers.
  LossValues losses_backward(const ViewBatch<T>& vb, const LossWeights<T>& w,
                             bool train = false,
                             std::mt19937_64* rng = nullptr) {
    vb.validate();
    check_views(vb);
    const std::size_t V = vb.images.size();
    const T invB = T(1) / T(vb.batch());

    std::vector<typename Encoder<T>::Cache> ec(V);
    std::vector<Mat<T>> z(V), dz(V);
    for (std::size_t j = 0; j < V; ++j) {
      z[j] = enc_.forward(vb.images[j], &ec[j], train, rng);
      dz[j].setZero(z[j].rows(), z[j].cols());
    }

    LossValues L;
    for (std::size_t j = 0; j < V; ++j) {
      typename Decoder<T>::Cache dc;
      Mat<T> rec = dec_.forward(z[j], &dc);
      Mat<T> diff = rec - vb.images[j];
      L.rc += double(diff.squaredNorm()) * double(invB);
      dz[j] += dec_.backward(Mat<T>(T(2) * w.rc * invB * diff), dc);
    }
    for (std::size_t j = 1; (w.eq != T(0) || w.eq_rc != T(0)) && j < V; ++j) {
      typename EqMap<T>::Cache mc;
      Mat<T> p = maps_[j - 1].forward(z[0], &mc);
      Mat<T> eqdiff = p - z[j];
      L.eq += double(eqdiff.squaredNorm()) * double(invB);

      typename Decoder<T>::Cache dc;
      Mat<T> rp = dec_.forward(p, &dc);
      Mat<T> rpdiff = rp - vb.images[j];
      L.eq_rc += double(rpdiff.squaredNorm()) * double(invB);

      Mat<T> dp = T(2) * w.eq * invB * eqdiff;
      dp += dec_.backward(Mat<T>(T(2) * w.eq_rc * invB * rpdiff), dc);
      dz[0] += maps_[j - 1].backward(dp, mc);
      dz[j] -= T(2) * w.eq * invB * eqdiff;
    }
    for (std::size_t j = 0; j < V; ++j) enc_.backward(dz[j], ec[j]);

    L.total = double(w.rc) * L.rc + double(w.eq) * L.eq +
              double(w.eq_rc) * L.eq_rc;
    check_finite(L, vb);
    return L;
  }

  // Median over samples and non-center viewpoints of
  // ||z_j - M_j(z_c)||^2 / ||z_j - z_c||^2; pairs with a degenerate
  // denominator are skipped. Inference mode (no dropout).
  double equivariance_ratio(const ViewBatch<T>& vb) const {
    vb.validate();
    check_views(vb);
    const Mat<T> zc = enc_.forward(vb.images[0]);
    std::vector<double> ratios;
    for (std::size_t j = 1; j < vb.images.size(); ++j) {
      const Mat<T> zj = enc_.forward(vb.images[j]);
      const Mat<T> p = maps_[j - 1].forward(zc);
      for (Eigen::Index i = 0; i < zc.cols(); ++i) {
        const double denom = double((zj.col(i) - zc.col(i)).squaredNorm());
        if (denom < 1e-12) continue;
        ratios.push_back(double((zj.col(i) - p.col(i)).squaredNorm()) / denom);
      }
    }
    require(!ratios.empty(), "equivariance_ratio: no valid pairs");
    auto mid = ratios.begin() + ratios.size() / 2;
    std::nth_element(ratios.begin(), mid, ratios.end());
    if (ratios.size() % 2 == 1) return *mid;
    const double hi = *mid;
    const double lo = *std::max_element(ratios.begin(), mid);
    return 0.5 * (lo + hi);
  }

 private:
  void check_views(const ViewBatch<T>& vb) const {
    require(vb.images.size() == maps_.size() + 1,
            "view batch does not match the model's viewpoint set");
    for (std::size_t j = 1; j < vb.viewpoints.size(); ++j)
      require(vb.viewpoints[j] == maps_[j - 1].viewpoint(),
              "view batch order does not match the model's maps");
  }

  void check_finite(const LossValues& L, const ViewBatch<T>& vb) const {
    if (std::isfinite(L.total)) return;
    // Identify the offending sample for the error message.
    for (Eigen::Index i = 0; i < vb.batch(); ++i)
      for (const auto& m : vb.images)
        if (!m.col(i).allFinite())
          throw EquinavError("non-finite loss at batch index " +
                             std::to_string(i));
    throw EquinavError("non-finite loss (diverged parameters)");
  }

  Encoder<T> enc_;
  Decoder<T> dec_;
  std::vector<EqMap<T>> maps_;
};

template <typename T>
inline ReprModel<T> make_repr_model(
    const std::vector<std::string>& side_viewpoints, int h = 48, int w = 64,
    double dropout_p = 0.5, int map_hidden = 128) {
  Encoder<T> enc = make_encoder<T>(h, w, dropout_p);
  Decoder<T> dec = make_decoder(enc);
  return ReprModel<T>(std::move(enc), std::move(dec), side_viewpoints,
                      map_hidden);
}

template <typename T>
inline ReprModel<T> make_mini_repr_model(
    const std::vector<std::string>& side_viewpoints, double dropout_p = 0.0,
    int map_hidden = 16) {
  Encoder<T> enc = make_mini_encoder<T>(dropout_p);
  Decoder<T> dec = make_mini_decoder(enc);
  return ReprModel<T>(std::move(enc), std::move(dec), side_viewpoints,
                      map_hidden);
}

}  // namespace equinav
