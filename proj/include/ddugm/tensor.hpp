// Multi-frame arrays: the payload type shared by every stage of the engine.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddugm {

using cplx = std::complex<double>;

/// Spatial/temporal extent of a frame-major T x H x W array.
struct Shape3 {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t frame_size() const { return height * width; }
  std::size_t size() const { return frames * height * width; }
  bool operator==(const Shape3&) const = default;

  std::string str() const {
    return std::to_string(frames) + "x" + std::to_string(height) + "x" + std::to_string(width);
  }
};

/// Dense frame-major row-major array. Index (t, y, x) lives at (t*H + y)*W + x.
template <class T>
class Array3 {
 public:
  using value_type = T;

  Array3() = default;
  Array3(std::size_t frames, std::size_t height, std::size_t width, T fill = T{})
      : Array3(Shape3{frames, height, width}, fill) {}
  explicit Array3(Shape3 shape, T fill = T{}) : shape_(shape), data_(shape.size(), fill) {
    if (shape.frames == 0 || shape.height == 0 || shape.width == 0)
      throw std::invalid_argument("Array3: all dimensions must be positive, got " + shape.str());
  }
  Array3(Shape3 shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (shape.frames == 0 || shape.height == 0 || shape.width == 0)
      throw std::invalid_argument("Array3: all dimensions must be positive, got " + shape.str());
    if (data_.size() != shape.size())
      throw std::invalid_argument("Array3: data length " + std::to_string(data_.size()) +
                                  " does not match shape " + shape.str());
  }

  const Shape3& shape() const { return shape_; }
  std::size_t frames() const { return shape_.frames; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t t, std::size_t y, std::size_t x) {
    return data_[(t * shape_.height + y) * shape_.width + x];
  }
  const T& operator()(std::size_t t, std::size_t y, std::size_t x) const {
    return data_[(t * shape_.height + y) * shape_.width + x];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  std::span<T> frame_span(std::size_t t) {
    check_frame(t);
    return std::span<T>(data_).subspan(t * shape_.frame_size(), shape_.frame_size());
  }
  std::span<const T> frame_span(std::size_t t) const {
    check_frame(t);
    return std::span<const T>(data_).subspan(t * shape_.frame_size(), shape_.frame_size());
  }

  /// Copy of frame t as a single-frame array.
  Array3 frame(std::size_t t) const {
    auto src = frame_span(t);
    return Array3(Shape3{1, shape_.height, shape_.width}, std::vector<T>(src.begin(), src.end()));
  }

  void set_frame(std::size_t t, const Array3& single) {
    if (single.frames() != 1 || single.height() != shape_.height || single.width() != shape_.width)
      throw std::invalid_argument("set_frame: expected 1x" + std::to_string(shape_.height) + "x" +
                                  std::to_string(shape_.width) + ", got " + single.shape().str());
    auto dst = frame_span(t);
    std::copy(single.data_.begin(), single.data_.end(), dst.begin());
  }

  bool operator==(const Array3&) const = default;

 private:
  void check_frame(std::size_t t) const {
    if (t >= shape_.frames)
      throw std::out_of_range("frame index " + std::to_string(t) + " out of range for " + shape_.str());
  }

  Shape3 shape_{};
  std::vector<T> data_;
};

/// Complex T x H x W data, image domain or k-space. A "frame" is a DynamicTensor with one frame.
using DynamicTensor = Array3<cplx>;
using RealTensor = Array3<float>;

/// Acquired index set per frame; stored as 0/1 bytes.
class SamplingMask {
 public:
  SamplingMask() = default;
  explicit SamplingMask(Array3<std::uint8_t> kept) : kept_(std::move(kept)) {
    for (auto& v : kept_.storage()) v = v ? 1 : 0;
    for (std::size_t t = 0; t < kept_.frames(); ++t) {
      std::size_t count = 0;
      for (auto v : kept_.frame_span(t)) count += v;
      if (count == 0)
        throw std::invalid_argument("SamplingMask: frame " + std::to_string(t) + " keeps no samples");
    }
  }

  const Shape3& shape() const { return kept_.shape(); }
  bool kept(std::size_t t, std::size_t y, std::size_t x) const { return kept_(t, y, x) != 0; }
  bool kept(std::size_t i) const { return kept_[i] != 0; }
  const Array3<std::uint8_t>& bits() const { return kept_; }

  std::size_t kept_count() const {
    std::size_t n = 0;
    for (auto v : kept_.values()) n += v;
    return n;
  }

  /// T*H*W / |kept|.
  double acceleration() const {
    return static_cast<double>(kept_.size()) / static_cast<double>(kept_count());
  }

  static SamplingMask full(Shape3 shape) { return SamplingMask(Array3<std::uint8_t>(shape, 1)); }

  bool operator==(const SamplingMask&) const = default;

 private:
  Array3<std::uint8_t> kept_;
};

inline void require_same_shape(const Shape3& a, const Shape3& b, const char* what) {
  if (!(a == b))
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.str() + " vs " + b.str());
}

inline double squared_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}
inline double l2_norm(std::span<const cplx> v) { return std::sqrt(squared_norm(v)); }
inline double l2_norm(const DynamicTensor& x) { return l2_norm(x.values()); }

/// <a, b> = sum conj(a) * b.
inline cplx inner(const DynamicTensor& a, const DynamicTensor& b) {
  require_same_shape(a.shape(), b.shape(), "inner");
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline bool all_finite(const DynamicTensor& x) {
  for (const auto& z : x.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

inline DynamicTensor operator-(const DynamicTensor& a, const DynamicTensor& b) {
  require_same_shape(a.shape(), b.shape(), "subtract");
  DynamicTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

}  // namespace ddugm
