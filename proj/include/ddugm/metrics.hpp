// PSNR / SSIM / MSE on magnitude images.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "ddugm/tensor.hpp"

namespace ddugm {

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

inline Array3<double> magnitude(const DynamicTensor& x) {
  Array3<double> out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::abs(x[i]);
  return out;
}

inline double peak(const Array3<double>& x) {
  double m = 0.0;
  for (double v : x.values()) m = std::max(m, v);
  return m;
}

inline double mse(const Array3<double>& ref, const Array3<double>& rec) {
  require_same_shape(ref.shape(), rec.shape(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - rec[i];
    s += d * d;
  }
  return s / static_cast<double>(ref.size());
}

inline double mse(const DynamicTensor& ref, const DynamicTensor& rec) { return mse(magnitude(ref), magnitude(rec)); }

/// 20 log10(max|ref| / sqrt(mse)); +inf when the images agree.
inline double psnr(const Array3<double>& ref, const Array3<double>& rec) {
  const double top = peak(ref);
  if (!(top > 0.0)) throw std::invalid_argument("psnr: reference is all zero, peak undefined");
  const double e = mse(ref, rec);
  if (e == 0.0) return kInfinitePsnr;
  return 20.0 * std::log10(top / std::sqrt(e));
}

inline double psnr(const DynamicTensor& ref, const DynamicTensor& rec) { return psnr(magnitude(ref), magnitude(rec)); }

/// Literal variant with the un-normalized error norm: 20 log10(max|ref| / ||ref - rec||_2).
inline double psnr_l2(const Array3<double>& ref, const Array3<double>& rec) {
  const double top = peak(ref);
  if (!(top > 0.0)) throw std::invalid_argument("psnr_l2: reference is all zero, peak undefined");
  const double e = mse(ref, rec) * static_cast<double>(ref.size());
  if (e == 0.0) return kInfinitePsnr;
  return 20.0 * std::log10(top / std::sqrt(e));
}

inline double psnr_l2(const DynamicTensor& ref, const DynamicTensor& rec) {
  return psnr_l2(magnitude(ref), magnitude(rec));
}

struct SsimParams {
  std::size_t window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

namespace detail {

inline std::vector<double> gaussian_window(const SsimParams& p) {
  std::vector<double> w(p.window * p.window);
  const double c = static_cast<double>(p.window - 1) / 2.0;
  double total = 0.0;
  for (std::size_t y = 0; y < p.window; ++y)
    for (std::size_t x = 0; x < p.window; ++x) {
      const double dy = static_cast<double>(y) - c, dx = static_cast<double>(x) - c;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * p.gaussian_sigma * p.gaussian_sigma));
      w[y * p.window + x] = v;
      total += v;
    }
  for (auto& v : w) v /= total;
  return w;
}

// Mean local SSIM over every window position fully inside the frame.
inline double ssim_frame(std::span<const double> a, std::span<const double> b, std::size_t height, std::size_t width,
                         double range, const SsimParams& p) {
  const auto w = gaussian_window(p);
  const double c1 = (p.k1 * range) * (p.k1 * range);
  const double c2 = (p.k2 * range) * (p.k2 * range);
  const std::size_t n = p.window;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t y0 = 0; y0 + n <= height; ++y0)
    for (std::size_t x0 = 0; x0 + n <= width; ++x0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
          const double k = w[y * n + x];
          const double va = a[(y0 + y) * width + x0 + x], vb = b[(y0 + y) * width + x0 + x];
          ma += k * va;
          mb += k * vb;
          saa += k * va * va;
          sbb += k * vb * vb;
          sab += k * va * vb;
        }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
      ++count;
    }
  return total / static_cast<double>(count);
}

}  // namespace detail

/// Per-frame SSIM with dynamic range L = max|ref| over the whole sequence.
inline std::vector<double> ssim_per_frame(const Array3<double>& ref, const Array3<double>& rec,
                                          const SsimParams& params = {}) {
  require_same_shape(ref.shape(), rec.shape(), "ssim");
  if (ref.height() < params.window || ref.width() < params.window)
    throw std::invalid_argument("ssim: frame " + std::to_string(ref.height()) + "x" + std::to_string(ref.width()) +
                                " is smaller than the " + std::to_string(params.window) + "x" +
                                std::to_string(params.window) + " window");
  const double range = peak(ref);
  if (!(range > 0.0)) throw std::invalid_argument("ssim: reference is all zero, dynamic range undefined");
  std::vector<double> out(ref.frames());
  for (std::size_t t = 0; t < ref.frames(); ++t)
    out[t] = detail::ssim_frame(ref.frame_span(t), rec.frame_span(t), ref.height(), ref.width(), range, params);
  return out;
}

inline double ssim(const Array3<double>& ref, const Array3<double>& rec, const SsimParams& params = {}) {
  const auto per = ssim_per_frame(ref, rec, params);
  double s = 0.0;
  for (double v : per) s += v;
  return s / static_cast<double>(per.size());
}

inline double ssim(const DynamicTensor& ref, const DynamicTensor& rec) { return ssim(magnitude(ref), magnitude(rec)); }

struct MetricReport {
  std::vector<double> psnr_db, ssim, mse;
  double mean_psnr_db = 0.0, mean_ssim = 0.0, mean_mse = 0.0;
  /// PSNR of the whole sequence at once (mse over T*H*W).
  double psnr_db_global = 0.0;
};

/// Frame-wise metrics; all frames share the reference's global peak.
inline MetricReport evaluate_metrics(const DynamicTensor& reference, const DynamicTensor& reconstruction) {
  const auto ref = magnitude(reference), rec = magnitude(reconstruction);
  require_same_shape(ref.shape(), rec.shape(), "metrics");
  const double top = peak(ref);
  if (!(top > 0.0)) throw std::invalid_argument("metrics: reference is all zero");
  MetricReport r;
  r.ssim = ssim_per_frame(ref, rec);
  for (std::size_t t = 0; t < ref.frames(); ++t) {
    double s = 0.0;
    auto a = ref.frame_span(t), b = rec.frame_span(t);
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    const double e = s / static_cast<double>(a.size());
    r.mse.push_back(e);
    r.psnr_db.push_back(e == 0.0 ? kInfinitePsnr : 20.0 * std::log10(top / std::sqrt(e)));
  }
  const double n = static_cast<double>(ref.frames());
  for (std::size_t t = 0; t < ref.frames(); ++t) {
    r.mean_psnr_db += r.psnr_db[t] / n;
    r.mean_ssim += r.ssim[t] / n;
    r.mean_mse += r.mse[t] / n;
  }
  r.psnr_db_global = psnr(ref, rec);
  return r;
}

}  // namespace ddugm
