// Counter-keyed normal streams. Each (seed, lane) pair owns an independent
// generator, so the order in which frames or branches are processed never
// changes the numbers any of them see.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ddugm/tensor.hpp"

namespace ddugm {

enum class Branch : std::uint32_t { kspace = 1, image = 2, phantom = 3, test = 4 };
enum class Phase : std::uint32_t { prior = 1, predictor = 2, corrector = 3, texture = 4 };

struct Lane {
  Branch branch = Branch::test;
  std::uint64_t frame = 0;
  std::uint64_t step = 0;
  std::uint64_t sweep = 0;
  Phase phase = Phase::prior;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Standard-normal source for one lane. Uses Box-Muller over mt19937_64 rather than
/// std::normal_distribution, whose algorithm is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, const Lane& lane) : engine_(lane_key(seed, lane)) {}

  static std::uint64_t lane_key(std::uint64_t seed, const Lane& lane) {
    std::uint64_t h = detail::splitmix64(seed);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(lane.branch));
    h = detail::splitmix64(h ^ lane.frame);
    h = detail::splitmix64(h ^ lane.step);
    h = detail::splitmix64(h ^ lane.sweep);
    h = detail::splitmix64(h ^ static_cast<std::uint64_t>(lane.phase));
    return h;
  }

  /// Uniform on (0, 1).
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Independent N(0,1) real and imaginary parts.
  cplx complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  DynamicTensor complex_normal(Shape3 shape) {
    DynamicTensor z(shape);
    for (auto& v : z.values()) v = complex_normal();
    return z;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ddugm
