// Time-interleaved Cartesian and uniform-angle pseudo-radial undersampling masks.
#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "ddugm/tensor.hpp"

namespace ddugm {

enum class MaskKind { cartesian, radial };

struct MaskSpec {
  MaskKind kind = MaskKind::cartesian;
  double acceleration = 4.0;
  std::size_t frames = 1;
  std::size_t height = 0;
  std::size_t width = 0;
  std::uint64_t seed = 0;  // reserved for radial jitter; unused by the deterministic patterns

  Shape3 shape() const { return {frames, height, width}; }
};

/// Frame t keeps every readout row ky with (ky - t) mod round(R) == 0.
inline SamplingMask cartesian_mask(const MaskSpec& spec) {
  if (spec.kind != MaskKind::cartesian) throw std::invalid_argument("cartesian_mask: spec is not cartesian");
  if (!(spec.acceleration >= 1.0)) throw std::invalid_argument("cartesian_mask: acceleration must be >= 1");
  const auto step = static_cast<std::size_t>(std::llround(spec.acceleration));
  if (step > spec.height)
    throw std::invalid_argument("cartesian_mask: acceleration " + std::to_string(step) +
                                " exceeds the number of phase-encoding rows " + std::to_string(spec.height));
  Array3<std::uint8_t> kept(spec.shape(), 0);
  for (std::size_t t = 0; t < spec.frames; ++t)
    for (std::size_t y = t % step; y < spec.height; y += step)
      for (std::size_t x = 0; x < spec.width; ++x) kept(t, y, x) = 1;
  return SamplingMask(std::move(kept));
}

/// Marks the pixels hit by full-diameter lines through (floor(H/2), floor(W/2)) at the
/// given angles (radians; 0 runs along kx, pi/2 along ky). Each line is walked at a
/// quarter-pixel step and every sample snaps to its nearest grid point.
inline void rasterize_spokes(std::span<std::uint8_t> frame, std::size_t height, std::size_t width,
                             std::span<const double> angles) {
  const double cy = static_cast<double>(height / 2), cx = static_cast<double>(width / 2);
  const double reach = static_cast<double>(std::max(height, width));
  const auto samples = static_cast<long>(4.0 * reach);
  for (double theta : angles) {
    const double dy = std::sin(theta), dx = std::cos(theta);
    for (long s = -samples; s <= samples; ++s) {
      const double rho = 0.25 * static_cast<double>(s);
      const long y = std::lround(cy + rho * dy);
      const long x = std::lround(cx + rho * dx);
      if (y < 0 || x < 0 || y >= static_cast<long>(height) || x >= static_cast<long>(width)) continue;
      frame[static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)] = 1;
    }
  }
}

namespace detail {

inline std::vector<double> spoke_angles(std::size_t spokes, std::size_t frame, std::size_t frames) {
  const double pi = std::numbers::pi;
  const double base = static_cast<double>(frame) * pi / static_cast<double>(spokes * frames);
  std::vector<double> angles(spokes);
  for (std::size_t s = 0; s < spokes; ++s) angles[s] = base + static_cast<double>(s) * pi / static_cast<double>(spokes);
  return angles;
}

inline double radial_fraction(std::size_t spokes, std::size_t height, std::size_t width, std::size_t frames) {
  std::vector<std::uint8_t> frame(height * width, 0);
  auto angles = spoke_angles(spokes, 0, frames);
  rasterize_spokes(frame, height, width, angles);
  std::size_t kept = 0;
  for (auto v : frame) kept += v;
  return static_cast<double>(kept) / static_cast<double>(frame.size());
}

}  // namespace detail

/// Spoke count S in [1, H+W] whose frame-0 kept fraction is closest to 1/R.
inline std::size_t radial_spoke_count(const MaskSpec& spec) {
  const double target = 1.0 / spec.acceleration;
  std::size_t best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s <= spec.height + spec.width; ++s) {
    const double gap = std::abs(detail::radial_fraction(s, spec.height, spec.width, spec.frames) - target);
    if (gap < best_gap) {
      best_gap = gap;
      best = s;
    }
  }
  return best;
}

/// S spokes per frame at theta_s = t*pi/(S*T) + s*pi/S.
inline SamplingMask radial_mask(const MaskSpec& spec) {
  if (spec.kind != MaskKind::radial) throw std::invalid_argument("radial_mask: spec is not radial");
  if (!(spec.acceleration >= 1.0)) throw std::invalid_argument("radial_mask: acceleration must be >= 1");
  const std::size_t spokes = radial_spoke_count(spec);
  Array3<std::uint8_t> kept(spec.shape(), 0);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    auto angles = detail::spoke_angles(spokes, t, spec.frames);
    rasterize_spokes(kept.frame_span(t), spec.height, spec.width, angles);
  }
  return SamplingMask(std::move(kept));
}

inline SamplingMask make_mask(const MaskSpec& spec) {
  return spec.kind == MaskKind::cartesian ? cartesian_mask(spec) : radial_mask(spec);
}

/// Parses "cartesian:R=8" / "radial:R=10". Dimensions are filled in by the caller.
inline MaskSpec parse_mask_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("mask spec must look like 'cartesian:R=8'");
  MaskSpec spec;
  const auto kind = text.substr(0, colon);
  if (kind == "cartesian")
    spec.kind = MaskKind::cartesian;
  else if (kind == "radial")
    spec.kind = MaskKind::radial;
  else
    throw std::invalid_argument("unknown mask kind '" + std::string(kind) + "'");
  auto rest = text.substr(colon + 1);
  if (!rest.starts_with("R=")) throw std::invalid_argument("mask spec needs R=<acceleration>");
  rest.remove_prefix(2);
  try {
    std::size_t used = 0;
    spec.acceleration = std::stod(std::string(rest), &used);
    if (used != rest.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad acceleration in mask spec '" + std::string(text) + "'");
  }
  if (!(spec.acceleration >= 1.0)) throw std::invalid_argument("mask acceleration must be >= 1");
  return spec;
}

}  // namespace ddugm
