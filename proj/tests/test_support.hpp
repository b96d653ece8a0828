// Shared fixtures: seeded inputs, brute-force oracles, temp paths.
#pragma once

#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "ddugm/ddugm.hpp"

namespace ddugm::testing {

inline DynamicTensor random_tensor(Shape3 shape, std::uint64_t seed, double scale = 1.0) {
  RngStream rng(seed, Lane{Branch::test, 0, 0, 0, Phase::prior});
  DynamicTensor x = rng.complex_normal(shape);
  for (auto& v : x.values()) v *= scale;
  return x;
}

inline Eigen::MatrixXcd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  RngStream rng(seed, Lane{Branch::test, 1, 0, 0, Phase::prior});
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.complex_normal();
  return m;
}

/// Direct O(N^2) centered DFT of each frame, written from the definition.
inline DynamicTensor brute_force_dft(const DynamicTensor& x, bool inverse) {
  const std::size_t H = x.height(), W = x.width();
  const double cy = static_cast<double>(H / 2), cx = static_cast<double>(W / 2);
  const double sign = inverse ? 1.0 : -1.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(H * W));
  DynamicTensor out(x.shape());
  for (std::size_t t = 0; t < x.frames(); ++t)
    for (std::size_t ky = 0; ky < H; ++ky)
      for (std::size_t kx = 0; kx < W; ++kx) {
        std::complex<double> acc{};
        for (std::size_t y = 0; y < H; ++y)
          for (std::size_t xx = 0; xx < W; ++xx) {
            const double phase = 2.0 * std::numbers::pi *
                                 ((static_cast<double>(ky) - cy) * (static_cast<double>(y) - cy) / static_cast<double>(H) +
                                  (static_cast<double>(kx) - cx) * (static_cast<double>(xx) - cx) / static_cast<double>(W));
            acc += x(t, y, xx) * std::polar(1.0, sign * phase);
          }
        out(t, ky, kx) = acc * scale;
      }
  return out;
}

inline double max_abs_diff(const DynamicTensor& a, const DynamicTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("ddugm_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ddugm::testing
