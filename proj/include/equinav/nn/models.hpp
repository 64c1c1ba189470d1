#pragma once

#include <memory>
#include <vector>

#include "equinav/nn/layers.hpp"

namespace equinav {

// Siamese convolutional encoder: conv-ELU stages, flatten, optional inverted
// dropout on the embedding (representation training only).
template <typename T>
class Encoder {
 public:
  struct Cache {
    std::vector<Mat<T>> conv_in;   // input to each conv
    std::vector<Mat<T>> elu_out;   // output of each ELU
    Mat<T> mask;                   // dropout mask, empty in inference
  };

  Encoder(int in_h, int in_w, double dropout_p = 0.5)
      : in_h_(in_h), in_w_(in_w), dropout_p_(dropout_p) {}

  void add_conv(int out_ch, int k, int stride, int pad) {
    const int ic = convs_.empty() ? 1 : convs_.back().out_ch;
    const int ih = convs_.empty() ? in_h_ : convs_.back().out_h;
    const int iw = convs_.empty() ? in_w_ : convs_.back().out_w;
    convs_.emplace_back("enc.conv" + std::to_string(convs_.size() + 1), ic,
                        out_ch, k, stride, pad, ih, iw);
  }

  int embed_dim() const { return convs_.back().out_size(); }
  int input_dim() const { return in_h_ * in_w_; }
  int grid_h() const { return convs_.back().out_h; }
  int grid_w() const { return convs_.back().out_w; }
  int grid_ch() const { return convs_.back().out_ch; }

  void init(std::mt19937_64& rng) {
    for (auto& c : convs_) c.init(rng);
  }

  void collect(std::vector<ParamRef<T>>& out) {
    for (auto& c : convs_) c.collect(out);
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  // train_dropout requires an RNG; inference is deterministic.
  Mat<T> forward(const Mat<T>& images, Cache* cache = nullptr,
                 bool train_dropout = false,
                 std::mt19937_64* rng = nullptr) const {
    require(images.rows() == input_dim(), "encode: image dimension mismatch");
    Mat<T> x = images;
    if (cache) {
      cache->conv_in.clear();
      cache->elu_out.clear();
    }
    for (const auto& c : convs_) {
      if (cache) cache->conv_in.push_back(x);
      x = elu_forward(c.forward(x));
      if (cache) cache->elu_out.push_back(x);
    }
    if (train_dropout && dropout_p_ > 0.0) {
      require(rng != nullptr, "encoder dropout needs an RNG");
      Mat<T> mask = dropout_mask<T>(x.rows(), x.cols(), dropout_p_, *rng);
      x = x.cwiseProduct(mask);
      if (cache) cache->mask = std::move(mask);
    }
    return x;
  }

  void backward(Mat<T> dz, const Cache& cache) {
    if (cache.mask.size() > 0) dz = dz.cwiseProduct(cache.mask);
    for (int i = int(convs_.size()) - 1; i >= 0; --i) {
      dz = elu_backward(dz, cache.elu_out[i]);
      dz = convs_[i].backward(dz, cache.conv_in[i], /*need_dx=*/i > 0);
    }
  }

  const std::vector<Conv2d<T>>& convs() const { return convs_; }

 private:
  int in_h_, in_w_;
  double dropout_p_;
  std::vector<Conv2d<T>> convs_;
};

// Decoder stage: optional nearest-neighbor 2x upsample, then convolution.
// ELU after every stage except the last (linear image output).
template <typename T>
class Decoder {
 public:
  struct Cache {
    std::vector<Mat<T>> conv_in;
    std::vector<Mat<T>> act_out;  // post-ELU outputs (empty slot for last)
  };

  Decoder(int grid_h, int grid_w, int grid_ch)
      : h_(grid_h), w_(grid_w), ch_(grid_ch) {}

  void add_stage(bool upsample, int out_ch, int k, int pad) {
    int ih = cur_h(), iw = cur_w();
    if (upsample) {
      ih *= 2;
      iw *= 2;
    }
    upsample_.push_back(upsample);
    convs_.emplace_back("dec.conv" + std::to_string(convs_.size() + 1),
                        cur_ch(), out_ch, k, 1, pad, ih, iw);
  }

  int embed_dim() const { return h_ * w_ * ch_; }
  int output_dim() const { return convs_.back().out_size(); }
  int out_h() const { return convs_.back().out_h; }
  int out_w() const { return convs_.back().out_w; }

  void init(std::mt19937_64& rng) {
    for (auto& c : convs_) c.init(rng);
  }

  void collect(std::vector<ParamRef<T>>& out) {
    for (auto& c : convs_) c.collect(out);
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  Mat<T> forward(const Mat<T>& z, Cache* cache = nullptr) const {
    require(z.rows() == embed_dim(), "decode: embedding dimension mismatch");
    Mat<T> x = z;  // reshape to the feature grid is an identity in NHWC
    if (cache) {
      cache->conv_in.clear();
      cache->act_out.clear();
    }
    int h = h_, w = w_, ch = ch_;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      if (upsample_[i]) {
        x = upsample2_forward(x, h, w, ch);
        h *= 2;
        w *= 2;
      }
      if (cache) cache->conv_in.push_back(x);
      x = convs_[i].forward(x);
      if (i + 1 < convs_.size()) x = elu_forward(x);
      if (cache) cache->act_out.push_back(x);
      h = convs_[i].out_h;
      w = convs_[i].out_w;
      ch = convs_[i].out_ch;
    }
    return x;
  }

  Mat<T> backward(Mat<T> dy, const Cache& cache) {
    for (int i = int(convs_.size()) - 1; i >= 0; --i) {
      if (i + 1 < int(convs_.size())) dy = elu_backward(dy, cache.act_out[i]);
      dy = convs_[i].backward(dy, cache.conv_in[i]);
      if (upsample_[i]) {
        const int h = convs_[i].in_h / 2, w = convs_[i].in_w / 2;
        dy = upsample2_backward(dy, h, w, convs_[i].in_ch);
      }
    }
    return dy;
  }

 private:
  int cur_h() const { return convs_.empty() ? h_ : convs_.back().out_h; }
  int cur_w() const { return convs_.empty() ? w_ : convs_.back().out_w; }
  int cur_ch() const { return convs_.empty() ? ch_ : convs_.back().out_ch; }

  int h_, w_, ch_;
  std::vector<bool> upsample_;
  std::vector<Conv2d<T>> convs_;
};

// Equivariant map M_{c->j}: two affine layers with ELU between.
template <typename T>
class EqMap {
 public:
  struct Cache {
    Mat<T> x, h;  // input and post-ELU hidden
  };

  EqMap(std::string viewpoint, int dim, int hidden = 128)
      : viewpoint_(std::move(viewpoint)),
        fc1_("map." + viewpoint_ + ".fc1", dim, hidden),
        fc2_("map." + viewpoint_ + ".fc2", hidden, dim) {}

  const std::string& viewpoint() const { return viewpoint_; }
  int dim() const { return int(fc1_.W.cols()); }

  void init(std::mt19937_64& rng) {
    fc1_.init(rng);
    fc2_.init(rng);
  }

  void collect(std::vector<ParamRef<T>>& out) {
    fc1_.collect(out);
    fc2_.collect(out);
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  // Residual form: the map models only the (small) displacement between the
  // center embedding and the side-view embedding. Forcing the identity part
  // through the hidden bottleneck would dominate the learning problem.
  Mat<T> forward(const Mat<T>& z, Cache* cache = nullptr) const {
    Mat<T> h = elu_forward(fc1_.forward(z));
    Mat<T> out = fc2_.forward(h) + z;
    if (cache) {
      cache->x = z;
      cache->h = std::move(h);
    }
    return out;
  }

  Mat<T> backward(const Mat<T>& dout, const Cache& cache) {
    Mat<T> dh = fc2_.backward(dout, cache.h);
    dh = elu_backward(dh, cache.h);
    return fc1_.backward(dh, cache.x) + dout;  // + skip-connection path
  }

 private:
  std::string viewpoint_;

 public:
  Dense<T> fc1_, fc2_;
};

// Policy head: affine stack with ReLU activations.
template <typename T>
class Policy {
 public:
  struct Cache {
    Mat<T> x, h1, h2;
  };

  Policy(int dim, int action_dim, int h1 = 100, int h2 = 10)
      : fc1_("pi.fc1", dim, h1),
        fc2_("pi.fc2", h1, h2),
        fc3_("pi.fc3", h2, action_dim) {}

  int dim() const { return int(fc1_.W.cols()); }
  int action_dim() const { return int(fc3_.W.rows()); }

  void init(std::mt19937_64& rng) {
    fc1_.init(rng);
    fc2_.init(rng);
    fc3_.init(rng);
  }

  void collect(std::vector<ParamRef<T>>& out) {
    fc1_.collect(out);
    fc2_.collect(out);
    fc3_.collect(out);
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  Mat<T> forward(const Mat<T>& z, Cache* cache = nullptr) const {
    Mat<T> h1 = relu_forward(fc1_.forward(z));
    Mat<T> h2 = relu_forward(fc2_.forward(h1));
    Mat<T> out = fc3_.forward(h2);
    if (cache) {
      cache->x = z;
      cache->h1 = std::move(h1);
      cache->h2 = std::move(h2);
    }
    return out;
  }

  Mat<T> backward(const Mat<T>& dout, const Cache& cache) {
    Mat<T> d = fc3_.backward(dout, cache.h2);
    d = relu_backward(d, cache.h2);
    d = fc2_.backward(d, cache.h1);
    d = relu_backward(d, cache.h1);
    return fc1_.backward(d, cache.x);
  }

  Dense<T> fc1_, fc2_, fc3_;
};

// Standard architecture for 64x48 inputs: channels (24,36,48,64), kernels
// (5,5,5,3), strides (2,2,2,1); embedding dim 1536 is derived from the
// resulting 6x4x64 feature grid.
template <typename T>
inline Encoder<T> make_encoder(int h = 48, int w = 64,
                               double dropout_p = 0.5) {
  Encoder<T> enc(h, w, dropout_p);
  enc.add_conv(24, 5, 2, 2);
  enc.add_conv(36, 5, 2, 2);
  enc.add_conv(48, 5, 2, 2);
  enc.add_conv(64, 3, 1, 0);
  return enc;
}

template <typename T>
inline Decoder<T> make_decoder(const Encoder<T>& enc) {
  Decoder<T> dec(enc.grid_h(), enc.grid_w(), enc.grid_ch());
  dec.add_stage(false, 32, 3, 2);  // back to the pre-valid-conv grid
  dec.add_stage(true, 16, 3, 1);
  dec.add_stage(true, 8, 3, 1);
  dec.add_stage(true, 1, 1, 0);  // per-pixel readout; 3x3 mixing done above
  return dec;
}

// Small instances for gradient verification (16x12 images, small D).
template <typename T>
inline Encoder<T> make_mini_encoder(double dropout_p = 0.0) {
  Encoder<T> enc(12, 16, dropout_p);
  enc.add_conv(4, 5, 2, 2);
  enc.add_conv(8, 3, 2, 1);
  return enc;  // grid 3x4x8, D = 96
}

template <typename T>
inline Decoder<T> make_mini_decoder(const Encoder<T>& enc) {
  Decoder<T> dec(enc.grid_h(), enc.grid_w(), enc.grid_ch());
  dec.add_stage(true, 4, 3, 1);
  dec.add_stage(true, 1, 3, 1);
  return dec;
}

// Operation aliases over single samples.
template <typename T>
inline Vec<T> encode(const Encoder<T>& enc, const Vec<T>& image) {
  return enc.forward(image);
}

template <typename T>
inline Vec<T> decode(const Decoder<T>& dec, const Vec<T>& z) {
  return dec.forward(z);
}

template <typename T>
inline Vec<T> map_embed(const EqMap<T>& m, const Vec<T>& z) {
  return m.forward(z);
}

template <typename T>
inline Vec<T> policy_eval(const Policy<T>& pi, const Vec<T>& z) {
  return pi.forward(z);
}

}  // namespace equinav
