// Centered orthonormal 2D Fourier encoding and Cartesian undersampling.
//
// Per frame, fft2c(x)[k] = (H*W)^(-1/2) * sum_n x[n] exp(-2 pi i (k - c).(n - c) / N)
// with c = (floor(H/2), floor(W/2)) in both domains, so DC sits at the array
// center and Parseval holds exactly.
#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "ddugm/tensor.hpp"

namespace ddugm {

namespace detail {

// The FFTW planner is not reentrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(std::size_t height, std::size_t width, int sign) : n_(height * width) {
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    if (!buffer_) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buffer_, buffer_, sign,
                             FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  cplx* buffer() { return reinterpret_cast<cplx*>(buffer_); }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

inline FftPlan& cached_plan(std::size_t height, std::size_t width, int sign) {
  thread_local std::map<std::tuple<std::size_t, std::size_t, int>, std::unique_ptr<FftPlan>> cache;
  auto key = std::make_tuple(height, width, sign);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(height, width, sign)).first;
  return *it->second;
}

// Centered transform of one H x W frame: ifftshift -> DFT -> fftshift, scaled by 1/sqrt(HW).
inline void centered_dft_frame(std::span<const cplx> in, std::span<cplx> out, std::size_t height,
                               std::size_t width, int sign) {
  FftPlan& plan = cached_plan(height, width, sign);
  cplx* buf = plan.buffer();
  const std::size_t cy = height / 2, cx = width / 2;
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t sy = (y + height - cy) % height;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t sx = (x + width - cx) % width;
      buf[sy * width + sx] = in[y * width + x];
    }
  }
  plan.execute();
  const double scale = 1.0 / std::sqrt(static_cast<double>(height * width));
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t dy = (y + cy) % height;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t dx = (x + cx) % width;
      out[dy * width + dx] = buf[y * width + x] * scale;
    }
  }
}

inline DynamicTensor centered_dft(const DynamicTensor& in, int sign) {
  DynamicTensor out(in.shape());
  for (std::size_t t = 0; t < in.frames(); ++t)
    centered_dft_frame(in.frame_span(t), out.frame_span(t), in.height(), in.width(), sign);
  return out;
}

}  // namespace detail

/// Image -> k-space, per frame.
inline DynamicTensor fft2c(const DynamicTensor& image) { return detail::centered_dft(image, FFTW_FORWARD); }

/// k-space -> image, per frame. Exact inverse and adjoint of fft2c.
inline DynamicTensor ifft2c(const DynamicTensor& kspace) { return detail::centered_dft(kspace, FFTW_BACKWARD); }

/// Zero every coefficient outside the mask.
inline DynamicTensor apply_mask(const DynamicTensor& kspace, const SamplingMask& mask) {
  require_same_shape(kspace.shape(), mask.shape(), "apply_mask");
  DynamicTensor out = kspace;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!mask.kept(i)) out[i] = cplx{};
  return out;
}

}  // namespace ddugm
