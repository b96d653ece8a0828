// Score oracles s(x, sigma) ~ grad log p_sigma(x) for single-domain frames.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ddugm/fft.hpp"
#include "ddugm/tensor.hpp"
#include "ddugm/weighting.hpp"

namespace ddugm {

enum class ScoreDomain { kspace, image };

inline std::string_view to_string(ScoreDomain d) { return d == ScoreDomain::kspace ? "kspace" : "image"; }

inline ScoreDomain parse_score_domain(std::string_view s) {
  if (s == "kspace") return ScoreDomain::kspace;
  if (s == "image") return ScoreDomain::image;
  throw std::invalid_argument("unknown score domain '" + std::string(s) + "'");
}

/// Thrown when a remote score server cannot be reached or hangs up.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a score reply violates the wire contract (bad framing, shape, status).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimates the score of the sigma-perturbed data distribution. Inputs are
/// T x H x W with every frame scored independently; outputs keep the input shape.
class ScoreProvider {
 public:
  explicit ScoreProvider(ScoreDomain domain) : domain_(domain) {}
  virtual ~ScoreProvider() = default;

  ScoreDomain domain() const { return domain_; }

  DynamicTensor score(const DynamicTensor& x, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("score: sigma must be positive");
    DynamicTensor out = evaluate(x, sigma);
    require_same_shape(out.shape(), x.shape(), "score provider output");
    if (!all_finite(out)) throw std::runtime_error("score provider returned non-finite values");
    return out;
  }

  virtual std::string describe() const = 0;

 protected:
  virtual DynamicTensor evaluate(const DynamicTensor& x, double sigma) = 0;

 private:
  ScoreDomain domain_;
};

class ZeroScore final : public ScoreProvider {
 public:
  using ScoreProvider::ScoreProvider;
  std::string describe() const override { return "zero"; }

 protected:
  DynamicTensor evaluate(const DynamicTensor& x, double) override { return DynamicTensor(x.shape()); }
};

/// Exact score of N(m, tau^2) smoothed by N(0, sigma^2), per real component:
/// (m - x) / (tau^2 + sigma^2). m and tau are either constants or per-pixel maps
/// broadcast over frames.
class GaussianScore final : public ScoreProvider {
 public:
  GaussianScore(ScoreDomain domain, cplx mean, double tau) : ScoreProvider(domain), mean_const_(mean), tau_const_(tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("GaussianScore: tau must be non-negative");
  }

  GaussianScore(ScoreDomain domain, DynamicTensor mean, std::vector<double> tau_map)
      : ScoreProvider(domain), mean_map_(std::move(mean)), tau_map_(std::move(tau_map)) {
    if (mean_map_->frames() != 1) throw std::invalid_argument("GaussianScore: mean must be a single frame");
    if (tau_map_.size() != mean_map_->size())
      throw std::invalid_argument("GaussianScore: tau map must match the mean frame");
    for (double t : tau_map_)
      if (!(t >= 0.0)) throw std::invalid_argument("GaussianScore: tau must be non-negative");
  }

  GaussianScore(ScoreDomain domain, DynamicTensor mean, double tau)
      : GaussianScore(domain, mean, std::vector<double>(mean.size(), tau)) {}

  std::string describe() const override {
    if (mean_map_) return "gaussian(map " + mean_map_->shape().str() + ")";
    return "gaussian(m=" + std::to_string(mean_const_.real()) + (mean_const_.imag() < 0 ? "" : "+") +
           std::to_string(mean_const_.imag()) + "i, tau=" + std::to_string(tau_const_) + ")";
  }

  cplx mean_at(std::size_t pixel) const { return mean_map_ ? (*mean_map_)[pixel] : mean_const_; }
  double tau_at(std::size_t pixel) const { return mean_map_ ? tau_map_[pixel] : tau_const_; }

 protected:
  DynamicTensor evaluate(const DynamicTensor& x, double sigma) override {
    if (mean_map_ && (mean_map_->height() != x.height() || mean_map_->width() != x.width()))
      throw std::invalid_argument("GaussianScore: frame " + x.shape().str() + " does not match mean " +
                                  mean_map_->shape().str());
    DynamicTensor out(x.shape());
    const double s2 = sigma * sigma;
    for (std::size_t t = 0; t < x.frames(); ++t) {
      auto in = x.frame_span(t);
      auto dst = out.frame_span(t);
      for (std::size_t i = 0; i < in.size(); ++i) {
        const double tau = tau_at(i);
        dst[i] = (mean_at(i) - in[i]) / (tau * tau + s2);
      }
    }
    return out;
  }

 private:
  std::optional<DynamicTensor> mean_map_;
  std::vector<double> tau_map_;
  cplx mean_const_{};
  double tau_const_ = 1.0;
};

/// Fits a per-pixel Gaussian prior to an ensemble of image frames, treating every
/// frame as an independent draw. For the k-space domain each frame is first
/// transformed with fft2c and weighted, matching what a k-space model is trained on.
/// tau is the per-component standard deviation about the mean, floored at tau_floor.
inline std::unique_ptr<GaussianScore> fit_gaussian_prior(const DynamicTensor& images, ScoreDomain domain,
                                                         const WeightMatrix* weight = nullptr,
                                                         double tau_floor = 1e-6) {
  DynamicTensor samples = images;
  if (domain == ScoreDomain::kspace) {
    samples = fft2c(images);
    if (weight) samples = weight_apply(samples, *weight);
  }
  const std::size_t n = samples.shape().frame_size();
  const double frames = static_cast<double>(samples.frames());
  DynamicTensor mean(1, samples.height(), samples.width());
  for (std::size_t t = 0; t < samples.frames(); ++t) {
    auto f = samples.frame_span(t);
    for (std::size_t i = 0; i < n; ++i) mean[i] += f[i];
  }
  for (auto& m : mean.values()) m /= frames;
  std::vector<double> tau(n, 0.0);
  for (std::size_t t = 0; t < samples.frames(); ++t) {
    auto f = samples.frame_span(t);
    for (std::size_t i = 0; i < n; ++i) tau[i] += std::norm(f[i] - mean[i]);
  }
  for (auto& v : tau) v = std::max(tau_floor, std::sqrt(v / (2.0 * frames)));
  return std::make_unique<GaussianScore>(domain, std::move(mean), std::move(tau));
}

}  // namespace ddugm
