// k-space frequency weighting W = max(floor, (p * (fy^2 + fx^2))^q).
//
// fy, fx are centered frequencies normalized by the line counts, so they lie in
// [-0.5, 0.5). The raw formula vanishes at DC; the floor keeps division finite.
#pragma once

#include <cmath>

#include "ddugm/tensor.hpp"

namespace ddugm {

struct WeightParams {
  double p = 1.0;
  double q = 0.5;
  double floor = 1e-3;
};

class WeightMatrix {
 public:
  WeightMatrix(std::size_t height, std::size_t width, WeightParams params)
      : height_(height), width_(width), params_(params), values_(height * width) {
    if (!(params.p > 0.0)) throw std::invalid_argument("weighting: p must be positive");
    if (!(params.floor > 0.0)) throw std::invalid_argument("weighting: floor must be positive");
    for (std::size_t y = 0; y < height; ++y) {
      const double fy = (static_cast<double>(y) - static_cast<double>(height / 2)) / static_cast<double>(height);
      for (std::size_t x = 0; x < width; ++x) {
        const double fx = (static_cast<double>(x) - static_cast<double>(width / 2)) / static_cast<double>(width);
        values_[y * width + x] = std::max(params.floor, raw_value(fy, fx));
      }
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  const WeightParams& params() const { return params_; }
  double operator()(std::size_t y, std::size_t x) const { return values_[y * width_ + x]; }
  std::span<const double> values() const { return values_; }

  /// Unclamped weight at normalized frequency (fy, fx).
  double raw_value(double fy, double fx) const { return std::pow(params_.p * (fy * fy + fx * fx), params_.q); }

 private:
  std::size_t height_, width_;
  WeightParams params_;
  std::vector<double> values_;
};

inline WeightMatrix build_weight(std::size_t height, std::size_t width, WeightParams params = {}) {
  return WeightMatrix(height, width, params);
}

namespace detail {
inline void check_weight_dims(const DynamicTensor& v, const WeightMatrix& w) {
  if (v.height() != w.height() || v.width() != w.width())
    throw std::invalid_argument("weighting: tensor " + v.shape().str() + " does not match weight " +
                                std::to_string(w.height()) + "x" + std::to_string(w.width()));
}
}  // namespace detail

inline DynamicTensor weight_apply(const DynamicTensor& v, const WeightMatrix& w) {
  detail::check_weight_dims(v, w);
  DynamicTensor out = v;
  const auto wv = w.values();
  for (std::size_t t = 0; t < out.frames(); ++t) {
    auto f = out.frame_span(t);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= wv[i];
  }
  return out;
}

inline DynamicTensor weight_remove(const DynamicTensor& v, const WeightMatrix& w) {
  detail::check_weight_dims(v, w);
  DynamicTensor out = v;
  const auto wv = w.values();
  for (std::size_t t = 0; t < out.frames(); ++t) {
    auto f = out.frame_span(t);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] /= wv[i];
  }
  return out;
}

}  // namespace ddugm
