// Synthetic beating "cardiac" phantom: static ellipses plus one ellipse whose
// axes follow 1 + beat * cos(2 pi t / T), composited back to front with 4x4
// supersampled coverage, plus a static Gaussian texture.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ddugm/rng.hpp"
#include "ddugm/tensor.hpp"

namespace ddugm {

/// Geometry in normalized coordinates: the frame spans [-1, 1] on both axes.
struct Ellipse {
  double center_y = 0.0, center_x = 0.0;
  double axis_y = 0.5, axis_x = 0.5;
  double angle = 0.0;      // radians, counter-clockwise
  double intensity = 1.0;  // painted value, in [0, 1]
  bool beats = false;
};

struct PhantomSpec {
  std::size_t frames = 8, height = 64, width = 64;
  double beat_amplitude = 0.2;  // fraction of the beating ellipse's axes
  std::vector<Ellipse> ellipses = default_ellipses();
  double texture_sigma = 0.05;
  std::uint64_t seed = 0;

  static std::vector<Ellipse> default_ellipses() {
    return {
        {0.0, 0.0, 0.85, 0.72, 0.0, 0.35, false},      // torso
        {-0.05, -0.42, 0.5, 0.22, 0.15, 0.08, false},  // left lung
        {-0.05, 0.42, 0.5, 0.22, -0.15, 0.08, false},  // right lung
        {0.05, 0.05, 0.36, 0.30, 0.4, 0.55, false},    // myocardium
        {0.05, 0.05, 0.22, 0.17, 0.4, 0.95, true},     // blood pool
        {0.62, 0.0, 0.09, 0.09, 0.0, 0.7, false},      // spine
    };
  }

  void validate() const {
    if (frames == 0 || height == 0 || width == 0) throw std::invalid_argument("phantom: dimensions must be positive");
    if (!(beat_amplitude >= 0.0 && beat_amplitude < 1.0)) throw std::invalid_argument("phantom: beat amplitude in [0, 1)");
    if (!(texture_sigma >= 0.0)) throw std::invalid_argument("phantom: texture sigma must be non-negative");
    for (const auto& e : ellipses) {
      if (!(e.intensity >= 0.0 && e.intensity <= 1.0)) throw std::invalid_argument("phantom: intensity outside [0, 1]");
      if (!(e.axis_y > 0.0 && e.axis_x > 0.0)) throw std::invalid_argument("phantom: ellipse axes must be positive");
    }
  }
};

/// Axis scale of beating ellipses in frame t. Uses min(t, T - t) so frames t and T - t
/// agree bit for bit.
inline double beat_scale(const PhantomSpec& spec, std::size_t t) {
  const std::size_t phase = std::min(t % spec.frames, spec.frames - t % spec.frames);
  return 1.0 + spec.beat_amplitude *
                   std::cos(2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(spec.frames));
}

inline constexpr int kPhantomSupersample = 4;

inline DynamicTensor make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const std::size_t H = spec.height, W = spec.width;
  DynamicTensor out(spec.frames, H, W);

  std::vector<double> texture(H * W, 0.0);
  if (spec.texture_sigma > 0.0) {
    RngStream rng(spec.seed, Lane{Branch::phantom, 0, 0, 0, Phase::texture});
    for (auto& v : texture) v = spec.texture_sigma * rng.normal();
  }

  const int ss = kPhantomSupersample;
  const double half_h = static_cast<double>(H) / 2.0, half_w = static_cast<double>(W) / 2.0;
  std::vector<double> frame(H * W);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    std::fill(frame.begin(), frame.end(), 0.0);
    const double scale = beat_scale(spec, t);
    for (const auto& e : spec.ellipses) {
      const double ay = e.axis_y * (e.beats ? scale : 1.0), ax = e.axis_x * (e.beats ? scale : 1.0);
      const double c = std::cos(e.angle), s = std::sin(e.angle);
      for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x) {
          int inside = 0;
          for (int sy = 0; sy < ss; ++sy)
            for (int sx = 0; sx < ss; ++sx) {
              const double py = (static_cast<double>(y) + (sy + 0.5) / ss - half_h) / half_h - e.center_y;
              const double px = (static_cast<double>(x) + (sx + 0.5) / ss - half_w) / half_w - e.center_x;
              const double u = (px * c + py * s) / ax;
              const double v = (-px * s + py * c) / ay;
              if (u * u + v * v <= 1.0) ++inside;
            }
          if (!inside) continue;
          const double cover = static_cast<double>(inside) / (ss * ss);
          double& p = frame[y * W + x];
          p = p * (1.0 - cover) + e.intensity * cover;
        }
    }
    auto dst = out.frame_span(t);
    for (std::size_t i = 0; i < frame.size(); ++i) dst[i] = cplx(frame[i] + texture[i], 0.0);
  }
  return out;
}

/// `count` phantoms with seeds first_seed, first_seed + 1, ... stacked along time.
inline DynamicTensor make_phantom_ensemble(PhantomSpec spec, std::size_t count, std::uint64_t first_seed) {
  if (count == 0) throw std::invalid_argument("phantom ensemble: count must be positive");
  DynamicTensor out(count * spec.frames, spec.height, spec.width);
  for (std::size_t k = 0; k < count; ++k) {
    spec.seed = first_seed + k;
    const auto one = make_phantom(spec);
    for (std::size_t t = 0; t < spec.frames; ++t) out.set_frame(k * spec.frames + t, one.frame(t));
  }
  return out;
}

}  // namespace ddugm
