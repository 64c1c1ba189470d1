#pragma once

#include <cmath>
#include <vector>

#include "equinav/nn/layers.hpp"

namespace equinav {

template <typename T>
struct AdamConfig {
  T lr = T(1e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Adam with bias correction. Moment buffers are keyed by position in the
// parameter list, so the same list (same order) must be passed every step.
template <typename T>
class Adam {
 public:
  explicit Adam(const std::vector<ParamRef<T>>& params,
                AdamConfig<T> cfg = {})
      : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
      m_.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Mat<T>::Zero(p.value->rows(), p.value->cols()));
    }
  }

  void step(const std::vector<ParamRef<T>>& params) {
    require(params.size() == m_.size(), "adam: parameter list changed size");
    ++t_;
    const T bc1 = T(1) - std::pow(cfg_.beta1, T(t_));
    const T bc2 = T(1) - std::pow(cfg_.beta2, T(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const Mat<T>& g = *params[i].grad;
      m_[i] = cfg_.beta1 * m_[i] + (T(1) - cfg_.beta1) * g;
      v_[i] = cfg_.beta2 * v_[i].array() +
              (T(1) - cfg_.beta2) * g.array().square();
      params[i].value->array() -=
          cfg_.lr * (m_[i].array() / bc1) /
          ((v_[i].array() / bc2).sqrt() + cfg_.eps);
    }
  }

  long steps() const { return t_; }
  const AdamConfig<T>& config() const { return cfg_; }

 private:
  AdamConfig<T> cfg_;
  long t_ = 0;
  std::vector<Mat<T>> m_, v_;
};

}  // namespace equinav
