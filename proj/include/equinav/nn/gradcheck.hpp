#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "equinav/nn/layers.hpp"

namespace equinav {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  long coords_checked = 0;
  bool pass = false;
};

// Compares analytic gradients against central finite differences.
//
// `forward_backward` must zero grads internally (or the caller does) and
// leave gradients in the params; `value` evaluates the loss without touching
// gradients. Checks at most `max_coords` coordinates per parameter, sampled
// deterministically. Relative error uses a unit floor in the denominator so
// near-zero coordinate pairs compare absolutely.
template <typename T>
inline GradCheckReport finite_diff_check(
    const std::function<double()>& value,
    const std::function<void()>& forward_backward,
    const std::vector<ParamRef<T>>& params, double tol = 1e-4,
    double h = 1e-4, long max_coords = 256, std::uint64_t seed = 0) {
  static_assert(sizeof(T) >= 8,
                "finite differences need double precision scalars");
  zero_grads(params);
  forward_backward();

  GradCheckReport rep;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const auto& p : params) {
    const Eigen::Index n = p.value->size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) idx[std::size_t(i)] = i;
    if (n > max_coords) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(std::size_t(max_coords));
    }
    for (Eigen::Index i : idx) {
      T* coord = p.value->data() + i;
      const T orig = *coord;
      *coord = orig + T(h);
      const double fp = value();
      *coord = orig - T(h);
      const double fm = value();
      *coord = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double analytic = double(p.grad->data()[i]);
      const double denom =
          std::max({std::abs(numeric), std::abs(analytic), 1.0});
      const double rel = std::abs(numeric - analytic) / denom;
      if (rel > rep.max_rel_error) {
        rep.max_rel_error = rel;
        rep.worst_param = p.name;
      }
      ++rep.coords_checked;
    }
  }
  rep.pass = rep.max_rel_error < tol;
  return rep;
}

}  // namespace equinav
