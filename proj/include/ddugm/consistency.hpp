// Dual-domain fusion g* = eta1 * v* + eta2 * fft2c(u*) and k-space data consistency.
#pragma once

#include <cmath>
#include <limits>

#include "ddugm/fft.hpp"
#include "ddugm/tensor.hpp"

namespace ddugm {

inline constexpr double kInfiniteMu = std::numeric_limits<double>::infinity();

struct FusionWeights {
  double eta1 = 0.75;
  double eta2 = 0.25;
  double mu = kInfiniteMu;

  void validate() const {
    if (!(eta1 >= 0.0) || !(eta2 >= 0.0)) throw std::invalid_argument("fusion weights must be non-negative");
    if (std::abs(eta1 + eta2 - 1.0) > 1e-12)
      throw std::invalid_argument("fusion weights must sum to 1, got " + std::to_string(eta1 + eta2));
    if (!(mu > 0.0)) throw std::invalid_argument("consistency weight mu must be positive (or inf)");
  }
};

/// Measurements plus the weights that govern how they are enforced.
class FusionConfig {
 public:
  FusionConfig(FusionWeights weights, DynamicTensor measurements, SamplingMask mask)
      : weights_(weights), mask_(std::move(mask)), b_(apply_mask(measurements, mask_)) {
    weights_.validate();
  }

  const FusionWeights& weights() const { return weights_; }
  const SamplingMask& mask() const { return mask_; }
  const DynamicTensor& measurements() const { return b_; }

 private:
  FusionWeights weights_;
  SamplingMask mask_;
  DynamicTensor b_;
};

/// k-space fusion; u_star is in the image domain.
inline DynamicTensor fuse(const DynamicTensor& v_star, const DynamicTensor& u_star, const FusionWeights& w) {
  require_same_shape(v_star.shape(), u_star.shape(), "fuse");
  DynamicTensor out = v_star;
  if (w.eta2 == 0.0) {
    for (auto& z : out.values()) z *= w.eta1;
    return out;
  }
  const DynamicTensor u_k = fft2c(u_star);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.eta1 * v_star[i] + w.eta2 * u_k[i];
  return out;
}

inline DynamicTensor fuse(const DynamicTensor& v_star, const DynamicTensor& u_star, const FusionConfig& cfg) {
  return fuse(v_star, u_star, cfg.weights());
}

/// Off the mask: unchanged. On the mask: (g + mu*b) / (1 + mu); mu = inf substitutes b.
/// Works on the frames [first, first + g.frames()) of the measurement set.
inline DynamicTensor data_consistency(const DynamicTensor& g, const FusionConfig& cfg, std::size_t first_frame = 0) {
  const auto& b = cfg.measurements();
  const auto& mask = cfg.mask();
  if (g.height() != b.height() || g.width() != b.width() || first_frame + g.frames() > b.frames())
    throw std::invalid_argument("data_consistency: " + g.shape().str() + " at frame " + std::to_string(first_frame) +
                                " does not fit measurements " + b.shape().str());
  const double mu = cfg.weights().mu;
  const bool hard = std::isinf(mu);
  DynamicTensor out = g;
  const std::size_t offset = first_frame * b.shape().frame_size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask.kept(offset + i)) continue;
    out[i] = hard ? b[offset + i] : (g[i] + mu * b[offset + i]) / (1.0 + mu);
  }
  return out;
}

/// || apply_mask(g) - b ||_2
inline double dc_residual(const DynamicTensor& g, const FusionConfig& cfg) {
  require_same_shape(g.shape(), cfg.measurements().shape(), "dc_residual");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (cfg.mask().kept(i)) s += std::norm(g[i] - cfg.measurements()[i]);
  return std::sqrt(s);
}

}  // namespace ddugm
