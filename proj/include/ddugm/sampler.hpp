// Reverse VE-SDE predictor and annealed Langevin corrector on single-domain frames.
#pragma once

#include <cmath>

#include "ddugm/rng.hpp"
#include "ddugm/schedule.hpp"
#include "ddugm/score.hpp"

namespace ddugm {

/// Corrector steps are skipped when the score norm falls below this.
inline constexpr double kDegenerateScoreNorm = 1e-12;

/// i.i.d. complex Gaussian with per-component std sigma_max.
inline DynamicTensor sample_prior(Shape3 shape, double sigma_max, RngStream& rng) {
  DynamicTensor x = rng.complex_normal(shape);
  for (auto& v : x.values()) v *= sigma_max;
  return x;
}

/// x_i = x_{i+1} + (s_{i+1}^2 - s_i^2) * score(x_{i+1}, s_{i+1}) + sqrt(s_{i+1}^2 - s_i^2) * z
/// with caller-supplied z. Valid for 0 <= i <= I-2.
inline DynamicTensor predictor_with_noise(const DynamicTensor& x, ScoreProvider& score, std::size_t i,
                                          const NoiseSchedule& schedule, const DynamicTensor& z) {
  if (i + 1 >= schedule.steps())
    throw std::out_of_range("predictor: step " + std::to_string(i) + " needs sigma_{i+1}");
  require_same_shape(x.shape(), z.shape(), "predictor noise");
  const double hi = schedule.sigma_at(i + 1), lo = schedule.sigma_at(i);
  const double gap = hi * hi - lo * lo;
  const double noise = std::sqrt(gap);
  const DynamicTensor g = score.score(x, hi);
  DynamicTensor out = x;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += gap * g[k] + noise * z[k];
  return out;
}

inline DynamicTensor predictor(const DynamicTensor& x, ScoreProvider& score, std::size_t i,
                               const NoiseSchedule& schedule, RngStream& rng) {
  const DynamicTensor z = rng.complex_normal(x.shape());
  return predictor_with_noise(x, score, i, schedule, z);
}

/// Langevin step at sigma_i with the SNR step-size rule, applied frame by frame:
/// eps = 2 * (r * |z| / |g|)^2, x + eps * g + sqrt(2 eps) * z.
inline DynamicTensor corrector_with_noise(const DynamicTensor& x, ScoreProvider& score, std::size_t i,
                                          const NoiseSchedule& schedule, const DynamicTensor& z) {
  require_same_shape(x.shape(), z.shape(), "corrector noise");
  const DynamicTensor g = score.score(x, schedule.sigma_at(i));
  const double r = schedule.snr();
  DynamicTensor out = x;
  for (std::size_t t = 0; t < x.frames(); ++t) {
    const double g_norm = l2_norm(g.frame_span(t));
    if (g_norm < kDegenerateScoreNorm) continue;
    const double z_norm = l2_norm(z.frame_span(t));
    const double ratio = r * z_norm / g_norm;
    const double eps = 2.0 * ratio * ratio;
    const double noise = std::sqrt(2.0 * eps);
    auto dst = out.frame_span(t);
    auto gs = g.frame_span(t);
    auto zs = z.frame_span(t);
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += eps * gs[k] + noise * zs[k];
  }
  return out;
}

inline DynamicTensor corrector(const DynamicTensor& x, ScoreProvider& score, std::size_t i,
                               const NoiseSchedule& schedule, RngStream& rng) {
  const DynamicTensor z = rng.complex_normal(x.shape());
  return corrector_with_noise(x, score, i, schedule, z);
}

/// Unconditional predictor-corrector chain from the N(0, sigma_max^2) prior down to
/// sigma_0, with `sweeps` corrector steps per level. Every frame is an independent
/// chain with its own RNG lanes.
inline DynamicTensor pc_sample(Shape3 shape, ScoreProvider& score, const NoiseSchedule& schedule,
                               std::size_t sweeps, std::uint64_t seed, Branch branch = Branch::test) {
  DynamicTensor out(shape);
  const Shape3 one{1, shape.height, shape.width};
  for (std::size_t t = 0; t < shape.frames; ++t) {
    RngStream prior_rng(seed, Lane{branch, t, schedule.steps() - 1, 0, Phase::prior});
    DynamicTensor x = sample_prior(one, schedule.sigma_max(), prior_rng);
    for (std::size_t step = schedule.steps() - 1; step-- > 0;) {
      RngStream p_rng(seed, Lane{branch, t, step, 0, Phase::predictor});
      x = predictor(x, score, step, schedule, p_rng);
      for (std::size_t j = 1; j <= sweeps; ++j) {
        RngStream c_rng(seed, Lane{branch, t, step, j, Phase::corrector});
        x = corrector(x, score, step, schedule, c_rng);
      }
    }
    out.set_frame(t, x);
  }
  return out;
}

}  // namespace ddugm
