#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "equinav/core.hpp"

namespace equinav {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Named view of one parameter array and its gradient accumulator.
template <typename T>
struct ParamRef {
  std::string name;
  Mat<T>* value;
  Mat<T>* grad;
};

template <typename T>
inline std::uint64_t param_hash(const std::vector<ParamRef<T>>& params) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& p : params) {
    h = fnv1a(p.name, h);
    h = fnv1a(p.value->data(), sizeof(T) * std::size_t(p.value->size()), h);
  }
  return h;
}

template <typename T>
inline void zero_grads(const std::vector<ParamRef<T>>& params) {
  for (const auto& p : params) p.grad->setZero();
}
// Fan-in-scaled uniform init, biases zero. Values are drawn in Eigen storage
// order so runs are reproducible.
template <typename T>
inline void init_uniform(Mat<T>& w, int fan_in, std::mt19937_64& rng) {
  const double bound = std::sqrt(1.0 / std::max(fan_in, 1));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = T(dist(rng));
}

template <typename T>
struct Dense {
  std::string name;
  Mat<T> W, b, dW, db;  // W: out x in, b: out x 1

  Dense(std::string n, int in, int out) : name(std::move(n)) {
    W.setZero(out, in);
    b.setZero(out, 1);
    dW.setZero(out, in);
    db.setZero(out, 1);
  }

  void init(std::mt19937_64& rng) { init_uniform(W, int(W.cols()), rng); }

  void collect(std::vector<ParamRef<T>>& out) {
    out.push_back({name + ".W", &W, &dW});
    out.push_back({name + ".b", &b, &db});
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  Mat<T> forward(const Mat<T>& x) const {
    require(x.rows() == W.cols(), name + ": input dimension mismatch");
    Mat<T> y = W * x;
    y.colwise() += b.col(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy, const Mat<T>& x_cache) {
    dW.noalias() += dy * x_cache.transpose();
    db.col(0) += dy.rowwise().sum();
    return W.transpose() * dy;
  }
};

// Feature maps use NHWC layout: within one sample column the index is
// (y*w + x)*channels + c. The GEMM result of im2col convolution is then
// already in output layout, no shuffle needed.
template <typename T>
struct Conv2d {
  std::string name;
  int in_ch, out_ch, k, stride, pad, in_h, in_w, out_h, out_w;
  Mat<T> W, b, dW, db;  // W: out_ch x (k*k*in_ch)

  Conv2d(std::string n, int ic, int oc, int kk, int s, int p, int ih, int iw)
      : name(std::move(n)),
        in_ch(ic),
        out_ch(oc),
        k(kk),
        stride(s),
        pad(p),
        in_h(ih),
        in_w(iw),
        out_h((ih + 2 * p - kk) / s + 1),
        out_w((iw + 2 * p - kk) / s + 1) {
    W.setZero(oc, kk * kk * ic);
    b.setZero(oc, 1);
    dW.setZero(oc, kk * kk * ic);
    db.setZero(oc, 1);
  }

  int in_size() const { return in_ch * in_h * in_w; }
  int out_size() const { return out_ch * out_h * out_w; }

  void init(std::mt19937_64& rng) { init_uniform(W, k * k * in_ch, rng); }

  void collect(std::vector<ParamRef<T>>& out) {
    out.push_back({name + ".W", &W, &dW});
    out.push_back({name + ".b", &b, &db});
  }

  std::vector<ParamRef<T>> params() {
    std::vector<ParamRef<T>> out;
    collect(out);
    return out;
  }

  // Fills the persistent scratch buffer instead of allocating: these
  // matrices run to tens of megabytes and a fresh allocation per call makes
  // training memory-bound on page faults. Padding gaps are zeroed in place.
  const Mat<T>& im2col(const Mat<T>& x) const {
    const Eigen::Index B = x.cols();
    col_.resize(k * k * in_ch, B * out_h * out_w);
    for (Eigen::Index bi = 0; bi < B; ++bi) {
      const T* src = x.col(bi).data();
      for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
          T* dst = col_.col(bi * out_h * out_w + oy * out_w + ox).data();
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= in_h) {
              std::fill_n(dst + std::size_t(ky) * k * in_ch, k * in_ch, T(0));
              continue;
            }
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= in_w)
                std::fill_n(dst + (std::size_t(ky) * k + kx) * in_ch, in_ch,
                            T(0));
              else
                std::copy_n(src + (std::size_t(iy) * in_w + ix) * in_ch,
                            in_ch, dst + (std::size_t(ky) * k + kx) * in_ch);
            }
          }
        }
      }
    }
    return col_;
  }

  void col2im(const Mat<T>& col, Mat<T>& dx) const {
    const Eigen::Index B = dx.cols();
    for (Eigen::Index bi = 0; bi < B; ++bi) {
      T* dst = dx.col(bi).data();
      for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
          const T* src = col.col(bi * out_h * out_w + oy * out_w + ox).data();
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * stride + ky - pad;
            if (iy < 0 || iy >= in_h) continue;
            for (int kx = 0; kx < k; ++kx) {
              const int ix = ox * stride + kx - pad;
              if (ix < 0 || ix >= in_w) continue;
              T* d = dst + (std::size_t(iy) * in_w + ix) * in_ch;
              const T* s = src + (std::size_t(ky) * k + kx) * in_ch;
              for (int c = 0; c < in_ch; ++c) d[c] += s[c];
            }
          }
        }
      }
    }
  }

  Mat<T> forward(const Mat<T>& x) const {
    require(x.rows() == in_size(), name + ": input dimension mismatch");
    const Eigen::Index B = x.cols();
    const Mat<T>& col = im2col(x);
    Mat<T> out(out_size(), B);
    Eigen::Map<Mat<T>> y0(out.data(), out_ch, B * out_h * out_w);
    y0.noalias() = W * col;
    y0.colwise() += b.col(0);
    return out;
  }

  Mat<T> backward(const Mat<T>& dy, const Mat<T>& x_cache,
                  bool need_dx = true) {
    const Eigen::Index B = x_cache.cols();
    const Mat<T>& col = im2col(x_cache);
    Eigen::Map<const Mat<T>> dy0(dy.data(), out_ch, B * out_h * out_w);
    dW.noalias() += dy0 * col.transpose();
    db.col(0) += dy0.rowwise().sum();
    Mat<T> dx;
    if (need_dx) {
      dcol_.resize(W.cols(), dy0.cols());
      dcol_.noalias() = W.transpose() * dy0;
      dx.setZero(in_size(), B);
      col2im(dcol_, dx);
    }
    return dx;
  }

 private:
  mutable Mat<T> col_;   // im2col scratch, reused across calls
  Mat<T> dcol_;          // backward scratch
};

template <typename T>
inline Mat<T> elu_forward(const Mat<T>& x) {
  // max(x,0) + expm1(min(x,0)): both branches vectorize, and the sum equals
  // the usual piecewise definition because the inactive branch contributes 0.
  return x.array().max(T(0)) + x.array().min(T(0)).expm1();
}

// Uses the cached output: d/dx elu = 1 for x>0 else elu(x)+1, which is
// min(y,0)+1 in terms of the cached output y.
template <typename T>
inline Mat<T> elu_backward(const Mat<T>& dy, const Mat<T>& y_cache) {
  return dy.array() * (y_cache.array().min(T(0)) + T(1));
}

template <typename T>
inline Mat<T> relu_forward(const Mat<T>& x) {
  return x.cwiseMax(T(0));
}

template <typename T>
inline Mat<T> relu_backward(const Mat<T>& dy, const Mat<T>& y_cache) {
  return (y_cache.array() > T(0)).template cast<T>() * dy.array();
}

// Inverted dropout; inference mode is the identity (expectation scaling).
template <typename T>
inline Mat<T> dropout_mask(Eigen::Index rows, Eigen::Index cols, double p,
                           std::mt19937_64& rng) {
  Mat<T> mask(rows, cols);
  std::bernoulli_distribution keep(1.0 - p);
  const T scale = T(1.0 / (1.0 - p));
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = keep(rng) ? scale : T(0);
  return mask;
}

// Nearest-neighbor 2x upsampling in NHWC layout.
template <typename T>
inline Mat<T> upsample2_forward(const Mat<T>& x, int h, int w, int ch) {
  const Eigen::Index B = x.cols();
  Mat<T> y(Eigen::Index(4) * h * w * ch, B);
  for (Eigen::Index bi = 0; bi < B; ++bi) {
    const T* src = x.col(bi).data();
    T* dst = y.col(bi).data();
    for (int yy = 0; yy < 2 * h; ++yy)
      for (int xx = 0; xx < 2 * w; ++xx)
        std::copy_n(src + (std::size_t(yy / 2) * w + xx / 2) * ch, ch,
                    dst + (std::size_t(yy) * 2 * w + xx) * ch);
  }
  return y;
}

template <typename T>
inline Mat<T> upsample2_backward(const Mat<T>& dy, int h, int w, int ch) {
  const Eigen::Index B = dy.cols();
  Mat<T> dx = Mat<T>::Zero(Eigen::Index(h) * w * ch, B);
  for (Eigen::Index bi = 0; bi < B; ++bi) {
    const T* src = dy.col(bi).data();
    T* dst = dx.col(bi).data();
    for (int yy = 0; yy < 2 * h; ++yy)
      for (int xx = 0; xx < 2 * w; ++xx) {
        T* d = dst + (std::size_t(yy / 2) * w + xx / 2) * ch;
        const T* s = src + (std::size_t(yy) * 2 * w + xx) * ch;
        for (int c = 0; c < ch; ++c) d[c] += s[c];
      }
  }
  return dx;
}

}  // namespace equinav
